"""
Four flows, quantum 500, one frame per visit, two transmitters.

Times are in nanoseconds; transmitters are 0-based.
"""

import pytest

from linksim.engine import PS_PER_NS
from linksim.models import LinkParams, SchedulerParams
from linksim.runner import ScriptedSimulation
from linksim.traffic import WORKED_EXAMPLE_QUANTUM, worked_example_arrivals

EXPECTED = [
    # (t_ns, action, channel, transmitter, bytes, dc after the decision)
    (0, "serve", 0, 0, 110, 390),
    (0, "serve", 1, 1, 250, 250),
    (976, "skip-deficit", 2, None, 800, 500),
    (976, "serve", 3, 0, 500, 0),
    (2096, "serve", 0, 1, 150, 740),
    (3392, "serve", 1, 1, 100, 650),
    (4288, "serve", 2, 1, 800, 200),
    (5072, "serve", 3, 0, 150, 350),
    (6368, "serve", 0, 0, 200, 1040),
    (8064, "serve", 1, 0, 300, 200),
    (10560, "skip-busy", 2, None, 800, 700),
    (10784, "serve", 2, 1, 200, 1000),
]


@pytest.fixture
def worked_example():
    simulation = ScriptedSimulation(
        worked_example_arrivals(),
        LinkParams(channels=4, transmitters=2),
        SchedulerParams(quantum=WORKED_EXAMPLE_QUANTUM, max_packets_per_visit=1),
    )
    summary = simulation.execute()
    return simulation, summary


def test_decision_sequence(worked_example):
    simulation, _ = worked_example
    observed = [
        (d.time // PS_PER_NS, d.action, d.channel_id, d.transmitter_id, d.size_bytes, d.dc)
        for d in simulation.decisions
    ]
    assert observed == EXPECTED


def test_first_round_picks_flows_one_and_two(worked_example):
    simulation, _ = worked_example
    first, second = simulation.decisions[:2]

    assert (first.channel_id, first.transmitter_id) == (0, 0)
    assert (second.channel_id, second.transmitter_id) == (1, 1)


def test_eight_hundred_byte_frame_waits_for_double_quantum(worked_example):
    simulation, _ = worked_example
    serve = next(
        d for d in simulation.decisions if d.action == "serve" and d.size_bytes == 800
    )
    assert serve.dc + serve.size_bytes == 2 * WORKED_EXAMPLE_QUANTUM


def test_every_frame_delivered_and_queues_reset(worked_example):
    simulation, summary = worked_example

    assert summary.dispatched_arrivals == 10
    assert summary.dispatched_completions == 10
    assert summary.clock == 12_480 * PS_PER_NS
    assert all(voq.dc == 0 and not voq.frames for voq in simulation.scheduler.voqs)
    assert sorted(simulation.served_arrivals()) == list(range(10))
