import pytest

from bd_cover.core.config import ComputeConfig
from bd_cover.core.selftest import SUITES, run_suite, selftest


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    report = run_suite(name, seed=7, iters=4, config=ComputeConfig(precision=24))
    assert report.failed == 0, report.first_counterexample
    assert report.passed == 4


def test_report_is_deterministic():
    a = selftest(42, 2, suites=["cover", "transfer"])
    b = selftest(42, 2, suites=["cover", "transfer"])
    assert a.to_json() == b.to_json()
    assert [s.name for s in a.suites] == ["cover", "transfer"]


def test_all_suites_by_default():
    report = selftest(1, 1)
    assert [s.name for s in report.suites] == list(SUITES)
    assert report.failures == 0


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        selftest(0, 0)
    with pytest.raises(ValueError):
        selftest(0, 1, suites=["nope"])
