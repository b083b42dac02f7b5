import pytest

from linksim.engine import PS_PER_SECOND, us_to_ps
from linksim.errors import UsageError
from linksim.link import Frame
from linksim.metrics import FlowStats, MetricsRecorder, jain_index, offered_load_bps, throughput_bps
from linksim.models import FixedSize, FlowSpec
from linksim.traffic import scenario_a_flows, scenario_b_flows


@pytest.mark.parametrize(
    "values, expected",
    [
        ([1, 1, 1, 1], 1.0),
        ([3, 1], 0.8),
        ([1, 1, 1, 0], 0.75),
        ([5], 1.0),
    ],
)
def test_jain_index_values(values, expected):
    assert jain_index(values) == pytest.approx(expected)


def test_jain_index_is_scale_and_permutation_invariant():
    values = [120e6, 118e6, 240e6, 90e6]

    assert jain_index([v * 7.5 for v in values]) == pytest.approx(jain_index(values))
    assert jain_index(values[::-1]) == pytest.approx(jain_index(values))


def test_jain_index_lower_bound():
    assert jain_index([1, 0, 0, 0]) == pytest.approx(1 / 4)


@pytest.mark.parametrize("values", [[], [0, 0, 0], [1, -1]])
def test_jain_index_rejects_degenerate_input(values):
    with pytest.raises(UsageError):
        jain_index(values)


def test_offered_load_of_reference_scenarios():
    a = scenario_a_flows()
    b = scenario_b_flows()

    assert offered_load_bps(a, 12) == pytest.approx(2.409e9, rel=0.001)
    assert offered_load_bps(b, 0) == pytest.approx(2.375e9)
    assert offered_load_bps(b, 12) == pytest.approx(2.426e9)


def test_single_flow_offered_rate():
    spec = FlowSpec(flow_id=0, mean_interframe_ps=us_to_ps(16), size=FixedSize(size_bytes=1000))
    assert spec.offered_bps(12) == pytest.approx(506e6)


def test_throughput_of_a_saturated_second():
    stats = FlowStats(flow_id=0, bytes_delivered=125_000_000)
    assert throughput_bps(stats, PS_PER_SECOND) == pytest.approx(1e9)


def test_throughput_needs_a_positive_duration():
    with pytest.raises(UsageError):
        throughput_bps(FlowStats(flow_id=0), 0)


def _frame(channel_id, size, created):
    return Frame(id=0, channel_id=channel_id, size_bytes=size, t_created=created, t_enqueued=created)


def test_recorder_counts_and_delays():
    recorder = MetricsRecorder(2, warmup=1000)
    recorder.record_generated(_frame(0, 500, 0), 0)
    recorder.record_generated(_frame(0, 300, 0), 0)
    recorder.record_generated(_frame(1, 64, 0), 0)
    recorder.record_delivered(_frame(0, 500, 0), 800)
    recorder.record_delivered(_frame(0, 300, 0), 1200)
    recorder.record_dropped(_frame(1, 64, 0), 0)

    flow0, flow1 = recorder.flows
    assert flow0.frames_delivered == 2
    assert flow0.bytes_delivered == 800
    assert flow0.bytes_measured == 300  # only the delivery after warm-up
    assert flow0.mean_delay == 1000
    assert flow0.max_delay == 1200
    assert flow1.frames_dropped == 1
    assert recorder.conservation_violations() == []


def test_conservation_counts_queued_and_in_flight():
    recorder = MetricsRecorder(1)
    for _ in range(3):
        recorder.record_generated(_frame(0, 64, 0), 0)
    assert recorder.conservation_violations() == [0]

    recorder.drain(queued=[2], in_flight=[1])
    assert recorder.conservation_violations() == []
