"""
Smoke test to verify pytest infrastructure and package imports are working.
"""

import src


def test_smoke():
    """Package imports and exposes a version."""
    assert src.__version__


def test_fixture_availability(g7):
    """The G7 fixture is available."""
    assert g7 is not None
    assert g7.n == 7
    assert len(g7.edges) == 8


def test_shipped_fixture_matches_inline(fixture_path, g7):
    """data/g7.edges describes the same graph as the inline fixture."""
    from src.core import parse_graph
    assert parse_graph(fixture_path.read_text(encoding='utf-8')) == g7
