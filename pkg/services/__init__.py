"""
Services package - fixture files, run reports and property suites
"""

from .fixtures import (FixtureFile, build_bundled_fixtures,
                       check_bundled_fixtures, load_fixture, parse_fixture,
                       serialize_fixture)
from .property_suites import SUITES, SuiteReport, run_suite
from .reports import RunReport

__all__ = [
    "FixtureFile",
    "build_bundled_fixtures",
    "check_bundled_fixtures",
    "load_fixture",
    "parse_fixture",
    "serialize_fixture",
    "SUITES",
    "SuiteReport",
    "run_suite",
    "RunReport",
]
