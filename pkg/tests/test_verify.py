import pytest

from latticegrowth.verify import SUITES, normalize_drift, run_suites, table1_expected
from latticegrowth.stepset import StepSet, drift


@pytest.mark.slow
def test_all_suites_pass():
    results = run_suites()
    assert [r.name for r in results] == list(SUITES)
    failed = [r.line() for r in results if not r.passed]
    assert not failed


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites(["nope"])


def test_normalize_drift():
    T = normalize_drift(StepSet.compass("N", "W", "SE", "S", "SW"))
    dx, dy = drift(T)
    assert dx >= dy >= 0


def test_table1_rows():
    assert table1_expected(0, 0, 5) == ("=", "=")
    assert table1_expected(2, 1, 0) == ("<", "<")
    assert table1_expected(1, 0, 1) == ("<", ">")
    assert table1_expected(1, 0, 0) == ("<", "=")
    assert table1_expected(1, 0, -1) == ("<", "<")
