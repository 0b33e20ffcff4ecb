"""Closed vocabularies shared by the model, the rule engine and the reports."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal


class ElementKind(str, Enum):
    EXTERNAL_ENTITY = "entity"
    PROCESS = "process"
    DATA_STORE = "store"

    @property
    def label(self) -> str:
        return ELEMENT_KIND_LABELS[self]


ELEMENT_KIND_LABELS: dict[ElementKind, str] = {
    ElementKind.EXTERNAL_ENTITY: "External entity",
    ElementKind.PROCESS: "Process",
    ElementKind.DATA_STORE: "Data store",
}

# Applicability lookups take either an element kind or this marker.
FLOW: Literal["flow"] = "flow"
FlowMarker = Literal["flow"]


class ThreatClass(str, Enum):
    SPOOFING = "Spoofing"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "Information disclosure"
    DENIAL_OF_SERVICE = "Denial of service"
    ELEVATION_OF_PRIVILEGE = "Elevation of privilege"

    @property
    def letter(self) -> str:
        return STRIDE_LETTERS[self]


STRIDE_LETTERS: dict[ThreatClass, str] = {
    ThreatClass.SPOOFING: "S",
    ThreatClass.TAMPERING: "T",
    ThreatClass.REPUDIATION: "R",
    ThreatClass.INFORMATION_DISCLOSURE: "I",
    ThreatClass.DENIAL_OF_SERVICE: "D",
    ThreatClass.ELEVATION_OF_PRIVILEGE: "E",
}

STRIDE_ORDER = tuple(ThreatClass)


class ConsequenceClass(str, Enum):
    SOURCE_TAMPERING = "source_tampering"
    BINARY_TAMPERING = "binary_tampering"
    IMPROPER_BUILD = "improper_build"
    CONTROL_INFO_TAMPERING = "control_info_tampering"
    INFRASTRUCTURE_TAMPERING = "infrastructure_tampering"

    @property
    def label(self) -> str:
        return CONSEQUENCE_LABELS[self]


CONSEQUENCE_LABELS: dict[ConsequenceClass, str] = {
    ConsequenceClass.SOURCE_TAMPERING: "Source tampering",
    ConsequenceClass.BINARY_TAMPERING: "Binary tampering",
    ConsequenceClass.IMPROPER_BUILD: "Improper build",
    ConsequenceClass.CONTROL_INFO_TAMPERING: "Control info tampering",
    ConsequenceClass.INFRASTRUCTURE_TAMPERING: "Infrastructure tampering",
}

CONSEQUENCE_ORDER = tuple(ConsequenceClass)


class PayloadKind(str, Enum):
    SOURCE_CODE = "source_code"
    BUILD_CONFIG = "build_config"
    REVIEW_DECISION = "review_decision"
    BINARY_ARTIFACT = "binary_artifact"
    BINARY_UNDER_EVALUATION = "binary_under_evaluation"
    PACKAGE_SOURCE_FORM = "package_source_form"
    PACKAGE_BINARY_FORM = "package_binary_form"
    IAC_CONFIG = "iac_config"
    TEST_REPORT = "test_report"
    DEPLOY_REPORT = "deploy_report"
    TEST_FEEDBACK = "test_feedback"
    RELEASED_ARTIFACT = "released_artifact"


class StageRole(str, Enum):
    DEVELOPER = "developer"
    TESTER = "tester"
    DEVOPS_ENGINEER = "devops_engineer"
    END_USER = "end_user"
    DEPENDENCY_SOURCE = "dependency_source"
    INTEGRATION = "integration"
    CONTINUOUS_INTEGRATION = "continuous_integration"
    TEST_STAGE = "test_stage"
    DEPLOYMENT = "deployment"
    RELEASE = "release"
    DISTRIBUTION_SERVER = "distribution_server"
    SOURCE_STORE = "source_store"
    ARTIFACT_STORE = "artifact_store"
    INFRASTRUCTURE_STORE = "infrastructure_store"
    STAGING_STORE = "staging_store"
    BINARY_STORE = "binary_store"
    GENERIC = "generic"

    @property
    def spec(self) -> RoleSpec:
        return ROLE_SPECS[self]


@dataclass(frozen=True)
class RoleSpec:
    """Rule metadata carried by a stage role.

    ``expected_kind`` of None accepts any element kind.
    """

    expected_kind: ElementKind | None
    extra_outbound: frozenset[ConsequenceClass] = frozenset()
    entity_exempt: bool = False


_ENTITY = ElementKind.EXTERNAL_ENTITY
_PROCESS = ElementKind.PROCESS
_STORE = ElementKind.DATA_STORE

ROLE_SPECS: dict[StageRole, RoleSpec] = {
    StageRole.DEVELOPER: RoleSpec(_ENTITY),
    StageRole.TESTER: RoleSpec(_ENTITY),
    StageRole.DEVOPS_ENGINEER: RoleSpec(_ENTITY),
    StageRole.END_USER: RoleSpec(_ENTITY, entity_exempt=True),
    StageRole.DEPENDENCY_SOURCE: RoleSpec(_ENTITY, entity_exempt=True),
    StageRole.INTEGRATION: RoleSpec(_PROCESS),
    StageRole.CONTINUOUS_INTEGRATION: RoleSpec(
        _PROCESS, frozenset({ConsequenceClass.IMPROPER_BUILD})
    ),
    StageRole.TEST_STAGE: RoleSpec(_PROCESS),
    StageRole.DEPLOYMENT: RoleSpec(
        _PROCESS, frozenset({ConsequenceClass.INFRASTRUCTURE_TAMPERING})
    ),
    StageRole.RELEASE: RoleSpec(_PROCESS),
    StageRole.DISTRIBUTION_SERVER: RoleSpec(_PROCESS),
    StageRole.SOURCE_STORE: RoleSpec(_STORE),
    StageRole.ARTIFACT_STORE: RoleSpec(_STORE),
    StageRole.INFRASTRUCTURE_STORE: RoleSpec(_STORE),
    StageRole.STAGING_STORE: RoleSpec(_STORE),
    StageRole.BINARY_STORE: RoleSpec(_STORE),
    StageRole.GENERIC: RoleSpec(None),
}


class ThreatKind(str, Enum):
    USER_SPOOFING = "user_spoofing"
    ENTITY_REPUDIATION = "entity_repudiation"
    SERVER_SPOOFING = "server_spoofing"
    UNRELIABLE_INPUT = "unreliable_input"
    LOCAL_FALSIFICATION = "local_falsification"
    ELEVATION_OF_PRIVILEGE = "elevation_of_privilege"
    PROCESS_REPUDIATION = "process_repudiation"
    SUBVERTED_BUILD_TOOL = "subverted_build_tool"
    UNTRUSTED_DEPENDENCY = "untrusted_dependency"
    DEPENDENCY_CONFUSION = "dependency_confusion"
    FLOW_TAMPERING = "flow_tampering"
    MALICIOUS_CLIENT_TOOL = "malicious_client_tool"
    STORE_TAMPERING = "store_tampering"
    LOG_REPUDIATION = "log_repudiation"

    @property
    def threat_class(self) -> ThreatClass:
        return THREAT_CLASSES[self]

    @property
    def label(self) -> str:
        return THREAT_LABELS[self]


THREAT_CLASSES: dict[ThreatKind, ThreatClass] = {
    ThreatKind.USER_SPOOFING: ThreatClass.SPOOFING,
    ThreatKind.SERVER_SPOOFING: ThreatClass.SPOOFING,
    ThreatKind.ENTITY_REPUDIATION: ThreatClass.REPUDIATION,
    ThreatKind.LOG_REPUDIATION: ThreatClass.REPUDIATION,
    ThreatKind.PROCESS_REPUDIATION: ThreatClass.REPUDIATION,
    ThreatKind.ELEVATION_OF_PRIVILEGE: ThreatClass.ELEVATION_OF_PRIVILEGE,
    ThreatKind.UNRELIABLE_INPUT: ThreatClass.TAMPERING,
    ThreatKind.LOCAL_FALSIFICATION: ThreatClass.TAMPERING,
    ThreatKind.SUBVERTED_BUILD_TOOL: ThreatClass.TAMPERING,
    ThreatKind.UNTRUSTED_DEPENDENCY: ThreatClass.TAMPERING,
    ThreatKind.DEPENDENCY_CONFUSION: ThreatClass.TAMPERING,
    ThreatKind.FLOW_TAMPERING: ThreatClass.TAMPERING,
    ThreatKind.MALICIOUS_CLIENT_TOOL: ThreatClass.TAMPERING,
    ThreatKind.STORE_TAMPERING: ThreatClass.TAMPERING,
}

THREAT_LABELS: dict[ThreatKind, str] = {
    ThreatKind.USER_SPOOFING: "User spoofing",
    ThreatKind.ENTITY_REPUDIATION: "Deny sending data to the system",
    ThreatKind.SERVER_SPOOFING: "Server spoofing",
    ThreatKind.UNRELIABLE_INPUT: "Receiving unreliable data",
    ThreatKind.LOCAL_FALSIFICATION: "Local falsification",
    ThreatKind.ELEVATION_OF_PRIVILEGE: "Elevation of privilege",
    ThreatKind.PROCESS_REPUDIATION: "Deny performing an action",
    ThreatKind.SUBVERTED_BUILD_TOOL: "Subverted build tools",
    ThreatKind.UNTRUSTED_DEPENDENCY: "Receiving unreliable dependencies",
    ThreatKind.DEPENDENCY_CONFUSION: "Packages with the same name",
    ThreatKind.FLOW_TAMPERING: "Altering data during communication",
    ThreatKind.MALICIOUS_CLIENT_TOOL: "Malicious development tool",
    ThreatKind.STORE_TAMPERING: "Improper data alteration",
    ThreatKind.LOG_REPUDIATION: "Log alteration",
}

# Elevation of privilege splits by what the intruder reaches.
EopVariant = Literal["system_data", "entity_functionality"]
EOP_VARIANTS: tuple[EopVariant, ...] = ("system_data", "entity_functionality")

EOP_VARIANT_LABELS: dict[str, str] = {
    "system_data": "Unauthorized access to system data",
    "entity_functionality": "Unauthorized access to entity functionality",
}

# Summary-row groups, in report order.
THREAT_GROUPS = (
    "External entities",
    "Processes",
    "Continuous integration",
    "Data flows",
    "Entity-originated flows",
    "Data stores",
)

THREAT_GROUP_OF: dict[ThreatKind, str] = {
    ThreatKind.USER_SPOOFING: "External entities",
    ThreatKind.ENTITY_REPUDIATION: "External entities",
    ThreatKind.SERVER_SPOOFING: "Processes",
    ThreatKind.UNRELIABLE_INPUT: "Processes",
    ThreatKind.LOCAL_FALSIFICATION: "Processes",
    ThreatKind.ELEVATION_OF_PRIVILEGE: "Processes",
    ThreatKind.PROCESS_REPUDIATION: "Processes",
    ThreatKind.SUBVERTED_BUILD_TOOL: "Continuous integration",
    ThreatKind.UNTRUSTED_DEPENDENCY: "Continuous integration",
    ThreatKind.DEPENDENCY_CONFUSION: "Continuous integration",
    ThreatKind.FLOW_TAMPERING: "Data flows",
    ThreatKind.MALICIOUS_CLIENT_TOOL: "Entity-originated flows",
    ThreatKind.STORE_TAMPERING: "Data stores",
    ThreatKind.LOG_REPUDIATION: "Data stores",
}

FLOW_ATTRIBUTED_KINDS = frozenset({ThreatKind.FLOW_TAMPERING, ThreatKind.MALICIOUS_CLIENT_TOOL})

PipelineStage = Literal["integration", "continuous_integration", "iac", "deployment", "release"]
PIPELINE_STAGES: tuple[PipelineStage, ...] = (
    "integration",
    "continuous_integration",
    "iac",
    "deployment",
    "release",
)

Severity = Literal["error", "warning"]

# Matrix section labels; flows sit between processes and stores.
MATRIX_SECTIONS = ("External entity", "Process", "Data flow", "Data store")


def parse_bool(value: str) -> bool:
    key = value.strip().lower()
    if key in ("true", "yes", "on", "1"):
        return True
    if key in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def letters(classes: frozenset[ThreatClass] | set[ThreatClass]) -> str:
    """Render STRIDE classes as ``"S, T, E"`` in canonical order."""
    return ", ".join(c.letter for c in STRIDE_ORDER if c in classes)
