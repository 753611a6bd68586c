import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

FIXTURES = os.path.join(
    os.path.dirname(__file__), "..", "src", "routelens", "fixtures"
)


def fixture_path(name: str) -> str:
    return os.path.abspath(os.path.join(FIXTURES, name))


def fixture_text(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture
def isp_out_text():
    return fixture_text("isp_out.cfg")


@pytest.fixture
def set_metric_snippet_text():
    return fixture_text("set_metric.snippet")


@pytest.fixture
def set_metric_spec_text():
    return fixture_text("set_metric.spec.json")
