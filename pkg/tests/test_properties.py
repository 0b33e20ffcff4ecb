"""Property-based checks of the model, the DSL and the rule engine.

Random models are valid by construction: every flow touches a process or is an
entity writing into a store, ids are unique and roles match element kinds.
"""

from __future__ import annotations

from dataclasses import replace
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import engine_view, oracle_threats
from pipeline_threats.dsl import parse, render
from pipeline_threats.engine import applicable_classes, enumerate_threats, integrity_filter
from pipeline_threats.model import (
    AnalysisOptions,
    DfdModel,
    Element,
    Flow,
    TrustBoundary,
    merge_boundaries,
    structurally_equal,
)
from pipeline_threats.schema import (
    FLOW,
    FLOW_ATTRIBUTED_KINDS,
    ConsequenceClass,
    ElementKind,
    PayloadKind,
    StageRole,
    ThreatClass,
    ThreatKind,
)
from pipeline_threats.validation import errors_only, validate, well_formed_flow

PROPERTY_RUNS = settings(max_examples=1000, deadline=None)

ROLES_BY_KIND = {
    kind: [role for role in StageRole if role.spec.expected_kind in (kind, None)]
    for kind in ElementKind
}

names = st.text(min_size=1, max_size=10)
sometimes = st.sampled_from([False, False, False, True])


@st.composite
def analysis_options(draw: st.DrawFn) -> AnalysisOptions:
    return AnalysisOptions(**{name: draw(st.booleans()) for name in AnalysisOptions.names()})


@st.composite
def pipeline_models(
    draw: st.DrawFn, max_elements: int = 6, min_boundaries: int = 1, random_options: bool = True
) -> DfdModel:
    boundaries = tuple(
        TrustBoundary(f"b{i}", draw(names), draw(sometimes))
        for i in range(draw(st.integers(min_boundaries, 3)))
    )
    elements = []
    for i in range(draw(st.integers(1, max_elements))):
        kind = draw(st.sampled_from(list(ElementKind)))
        elements.append(
            Element(
                id=f"e{i}",
                name=draw(names),
                kind=kind,
                role=draw(st.sampled_from(ROLES_BY_KIND[kind])),
                boundary=draw(st.sampled_from(boundaries)).id,
                is_log=kind == ElementKind.DATA_STORE and draw(st.booleans()),
                trusted=draw(sometimes),
            )
        )

    pairs = [
        (a.id, b.id)
        for a in elements
        for b in elements
        if a.id != b.id and well_formed_flow(a.kind, b.kind)
    ]
    flows: tuple[Flow, ...] = ()
    if pairs:
        drawn = draw(
            st.lists(st.tuples(st.sampled_from(pairs), st.sampled_from(list(PayloadKind))), max_size=8)
        )
        flows = tuple(Flow(f"f{i}", src, dst, payload) for i, ((src, dst), payload) in enumerate(drawn))

    options = draw(analysis_options()) if random_options else AnalysisOptions()
    return DfdModel(
        name=draw(names),
        boundaries=boundaries,
        elements=tuple(elements),
        flows=flows,
        options=options,
    )


def with_option(model: DfdModel, **overrides: bool) -> DfdModel:
    return replace(model, options=model.options.with_overrides(**overrides))


def outline(model: DfdModel) -> list[tuple]:
    return [(t.id, t.consequences, t.variant) for t in enumerate_threats(model)]


@PROPERTY_RUNS
@given(pipeline_models())
def test_generated_models_are_valid(model):
    assert errors_only(validate(model)) == []


@PROPERTY_RUNS
@given(pipeline_models())
def test_threats_conform_to_stride_per_element(model):
    threats = enumerate_threats(model)
    assert len({t.id for t in threats}) == len(threats)
    for threat in threats:
        assert threat.consequences
        if threat.kind in FLOW_ATTRIBUTED_KINDS:
            kind, is_log = FLOW, False
        else:
            element = model.element(threat.attributed_to)
            kind, is_log = element.kind, element.is_log
            if element.kind == ElementKind.DATA_STORE:
                assert threat.threat_class != ThreatClass.SPOOFING
        assert threat.threat_class in integrity_filter(
            applicable_classes(kind, is_log), model.options.integrity_only
        )
        assert threat.threat_class not in (
            ThreatClass.INFORMATION_DISCLOSURE,
            ThreatClass.DENIAL_OF_SERVICE,
        )


@PROPERTY_RUNS
@given(pipeline_models(min_boundaries=2), st.data())
def test_merging_boundaries_never_adds_threats(model, data):
    a, b = data.draw(st.permutations([x.id for x in model.boundaries]))[:2]
    merged = merge_boundaries(model, a, b)
    assert len(merged.elements) == len(model.elements)
    assert merged.flows == model.flows
    before = {t.id for t in enumerate_threats(model)}
    after = [t.id for t in enumerate_threats(merged)]
    assert len(after) <= len(before)
    assert set(after) <= before


@PROPERTY_RUNS
@given(pipeline_models())
def test_render_then_parse_is_identity(model):
    text = render(model)
    result = parse(text)
    assert result.errors == ()
    assert structurally_equal(result.model, model)
    assert render(result.model) == text


@PROPERTY_RUNS
@given(pipeline_models())
def test_analysis_is_deterministic(model):
    assert validate(model) == validate(model)
    assert enumerate_threats(model) == enumerate_threats(model)
    # evidence text follows model order; ids, consequences and sorting do not
    shuffled = replace(model, elements=model.elements[::-1], flows=model.flows[::-1])
    assert outline(shuffled) == outline(model)


@settings(max_examples=300, deadline=None)
@given(pipeline_models())
def test_exclusion_options_remove_exactly_their_threats(model):
    exact = {
        "include_eop": lambda t: t.threat_class == ThreatClass.ELEVATION_OF_PRIVILEGE,
        "include_entity_threats": lambda t: t.kind
        in (ThreatKind.USER_SPOOFING, ThreatKind.ENTITY_REPUDIATION),
        "include_dependency_threats": lambda t: t.kind
        in (ThreatKind.UNTRUSTED_DEPENDENCY, ThreatKind.DEPENDENCY_CONFUSION),
        "include_process_repudiation": lambda t: t.kind == ThreatKind.PROCESS_REPUDIATION,
    }
    for option, belongs in exact.items():
        enabled = enumerate_threats(with_option(model, **{option: True}))
        disabled = enumerate_threats(with_option(model, **{option: False}))
        assert disabled == [t for t in enabled if not belongs(t)], option


@settings(max_examples=300, deadline=None)
@given(pipeline_models())
def test_build_tool_option_only_shrinks(model):
    enabled = {t.id: t for t in enumerate_threats(with_option(model, include_build_tool_threats=True))}
    disabled = {t.id: t for t in enumerate_threats(with_option(model, include_build_tool_threats=False))}
    for threat_id, threat in disabled.items():
        assert threat.consequences <= enabled[threat_id].consequences
    for threat_id, threat in enabled.items():
        if threat_id not in disabled:
            assert threat.kind == ThreatKind.SUBVERTED_BUILD_TOOL or threat.consequences == {
                ConsequenceClass.IMPROPER_BUILD
            }


@settings(max_examples=300, deadline=None)
@given(pipeline_models())
def test_boundary_suppression_only_removes(model):
    suppressed = {t.id for t in enumerate_threats(with_option(model, boundary_suppression=True))}
    everything = {t.id for t in enumerate_threats(with_option(model, boundary_suppression=False))}
    assert suppressed <= everything


@PROPERTY_RUNS
@given(pipeline_models())
def test_engine_matches_oracle_on_random_models(model):
    threats = enumerate_threats(model)
    assert engine_view(threats) == oracle_threats(model)
    assert len(engine_view(threats)) == len(threats)


SMALL_OPTIONS = {
    "defaults": AnalysisOptions(),
    "unsuppressed": AnalysisOptions(boundary_suppression=False, include_process_repudiation=True),
    "trimmed": AnalysisOptions(
        integrity_only=False,
        include_eop=False,
        include_dependency_threats=False,
        include_build_tool_threats=False,
        include_entity_threats=False,
    ),
}


def small_family(options: AnalysisOptions):
    """Entity -> process -> store -> process chains over a reduced alphabet."""
    boundaries = (TrustBoundary("b1", "one"), TrustBoundary("b2", "two"))
    for entity_role, process_role, log, inbound, stored, read, placement in product(
        (StageRole.DEVELOPER, StageRole.DEPENDENCY_SOURCE),
        (StageRole.CONTINUOUS_INTEGRATION, StageRole.DEPLOYMENT, StageRole.TEST_STAGE),
        (False, True),
        (PayloadKind.SOURCE_CODE, PayloadKind.PACKAGE_BINARY_FORM, PayloadKind.IAC_CONFIG),
        (PayloadKind.BINARY_ARTIFACT, PayloadKind.IAC_CONFIG, PayloadKind.TEST_REPORT),
        (PayloadKind.BINARY_ARTIFACT, PayloadKind.IAC_CONFIG, PayloadKind.BINARY_UNDER_EVALUATION),
        product(("b1", "b2"), repeat=3),
    ):
        yield DfdModel(
            name="small",
            boundaries=boundaries,
            elements=(
                Element("x", "X", ElementKind.EXTERNAL_ENTITY, entity_role, "b1"),
                Element("p", "P", ElementKind.PROCESS, process_role, placement[0]),
                Element("s", "S", ElementKind.DATA_STORE, StageRole.GENERIC, placement[1], is_log=log),
                Element("q", "Q", ElementKind.PROCESS, StageRole.RELEASE, placement[2]),
            ),
            flows=(
                Flow("f1", "x", "p", inbound),
                Flow("f2", "p", "s", stored),
                Flow("f3", "s", "q", read),
            ),
            options=options,
        )


@pytest.mark.parametrize("options", list(SMALL_OPTIONS.values()), ids=list(SMALL_OPTIONS))
def test_engine_matches_oracle_exhaustively(options):
    checked = 0
    for model in small_family(options):
        assert engine_view(enumerate_threats(model)) == oracle_threats(model), render(model)
        checked += 1
    assert checked == 2 * 3 * 2 * 3 * 3 * 3 * 8
