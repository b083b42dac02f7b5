"""
Full-length fairness runs on the built-in presets. Slow: run with `pytest -m slow`.
"""

import pytest

from linksim.models import SchedulerParams
from linksim.report import emit_report
from linksim.runner import run_scenario
from linksim.scenario import preset

pytestmark = pytest.mark.slow


def _checked(name, seed=1, **changes):
    return preset(name, duration_s=30.0, seed=seed).with_changes(check_invariants=True, **changes)


def test_scenario_a_fairness():
    report = run_scenario(_checked("paper-a"))

    assert len(report.flows) == 16
    assert report.jain_index >= 0.999
    assert report.max_min_ratio <= 1.05


def test_scenario_b_fairness_and_goodput():
    report = run_scenario(_checked("paper-b"))

    assert report.jain_index >= 0.999
    assert 1.90e9 <= report.aggregate_throughput_bps <= 2.00e9
    assert all(118e6 <= f.throughput_bps <= 128e6 for f in report.flows)


def test_baseline_contrast_on_same_seed():
    mcdrr = run_scenario(_checked("paper-b", seed=5))
    baseline = run_scenario(_checked("paper-b", seed=5, scheduler=SchedulerParams(name="rr-baseline")))

    assert mcdrr.jain_index >= 0.999
    assert baseline.jain_index <= 0.99


@pytest.mark.parametrize("name", ["paper-a", "paper-b"])
def test_presets_are_byte_reproducible(name, tmp_path):
    written = []
    for run in ("first", "second"):
        report = run_scenario(preset(name, duration_s=30.0, seed=11))
        written.append(emit_report(report, tmp_path / run, name))

    for a, b in zip(*written):
        assert a.read_bytes() == b.read_bytes()
