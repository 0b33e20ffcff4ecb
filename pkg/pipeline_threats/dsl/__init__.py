"""Text front end for pipeline models (``.dfd`` files)."""

from pipeline_threats.dsl.parser import ParseResult, parse, parse_file
from pipeline_threats.dsl.render import render

__all__ = ["ParseResult", "parse", "parse_file", "render"]
