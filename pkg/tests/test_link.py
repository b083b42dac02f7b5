import pytest

from linksim.errors import InvariantViolation, UsageError
from linksim.link import Frame, LinkState, transmission_duration
from linksim.models import LinkParams


def _frame(frame_id, channel_id, size=500):
    return Frame(id=frame_id, channel_id=channel_id, size_bytes=size, t_created=0, t_enqueued=0)


@pytest.mark.parametrize(
    "size, expected_ps",
    [
        (1518, 12_240_000),
        (500, 4_096_000),
        (52, 512_000),
        (110, 976_000),
    ],
)
def test_transmission_duration_at_one_gigabit(size, expected_ps):
    assert transmission_duration(size, 12, 10**9) == expected_ps


def test_transmission_duration_rounds_half_up():
    # 1 byte at 3 b/s: 8e12 / 3 = 2666666666666.67 ps
    assert transmission_duration(1, 0, 3) == 2_666_666_666_667
    # 1 byte at 16e12 b/s: exactly 0.5 ps
    assert transmission_duration(1, 0, 16 * 10**12) == 1


def test_transmission_duration_rejects_bad_input():
    with pytest.raises(UsageError):
        transmission_duration(0, 12, 10**9)
    with pytest.raises(UsageError):
        transmission_duration(64, 12, 0)


def test_acquire_returns_lowest_idle_transmitter():
    link = LinkState(LinkParams(channels=4, transmitters=3))
    assert link.acquire_transmitter() == 0

    link.begin_transmission(_frame(0, 0), 0, 0, 0)
    assert link.acquire_transmitter() == 1
    link.begin_transmission(_frame(1, 1), 1, 1, 0)
    link.begin_transmission(_frame(2, 2), 2, 2, 0)
    assert link.acquire_transmitter() is None

    link.end_transmission(1, 1, 4_096_000)
    assert link.acquire_transmitter() == 1


def test_begin_and_end_round_trip():
    link = LinkState(LinkParams(channels=2, transmitters=1))
    frame = _frame(0, 1, size=500)

    completion = link.begin_transmission(frame, 1, 0, 1000)
    assert completion == 1000 + 4_096_000
    assert frame.t_tx_start == 1000
    assert link.channels[1].busy and link.channels[1].current_transmitter == 0
    assert link.transmitters[0].current_channel == 1
    link.check_invariants()

    delivered = link.end_transmission(0, 1, completion)
    assert delivered is frame
    assert frame.t_delivered == completion
    assert not link.channels[1].busy and not link.transmitters[0].busy
    assert link.channels[1].busy_ps == 4_096_000
    link.check_invariants()


def test_busy_channel_cannot_take_a_second_transmitter():
    link = LinkState(LinkParams(channels=2, transmitters=2))
    link.begin_transmission(_frame(0, 0), 0, 0, 0)

    with pytest.raises(InvariantViolation):
        link.begin_transmission(_frame(1, 0), 0, 1, 0)


def test_busy_transmitter_cannot_start_a_second_channel():
    link = LinkState(LinkParams(channels=2, transmitters=2))
    link.begin_transmission(_frame(0, 0), 0, 0, 0)

    with pytest.raises(InvariantViolation):
        link.begin_transmission(_frame(1, 1), 1, 0, 0)


def test_end_with_wrong_pairing_is_rejected():
    link = LinkState(LinkParams(channels=2, transmitters=2))
    link.begin_transmission(_frame(0, 0), 0, 0, 0)

    with pytest.raises(InvariantViolation):
        link.end_transmission(1, 0, 100)
    with pytest.raises(InvariantViolation):
        link.end_transmission(0, 1, 100)


def test_tuning_time_applies_only_on_channel_change():
    link = LinkState(LinkParams(channels=2, transmitters=1, tuning_time_ps=50_000))

    first = link.begin_transmission(_frame(0, 0), 0, 0, 0)
    assert first == 4_096_000  # never tuned before
    link.end_transmission(0, 0, first)

    same = link.begin_transmission(_frame(1, 0), 0, 0, first)
    assert same == first + 4_096_000
    link.end_transmission(0, 0, same)

    switched = link.begin_transmission(_frame(2, 1), 1, 0, same)
    assert switched == same + 50_000 + 4_096_000


def test_utilization_counts_completed_occupancy():
    link = LinkState(LinkParams(channels=2, transmitters=1))
    done = link.begin_transmission(_frame(0, 0, size=1518), 0, 0, 0)
    link.end_transmission(0, 0, done)

    assert link.utilization(2 * done) == [0.5, 0.0]
    assert link.utilization(0) == [0.0, 0.0]


def test_in_flight_lists_frames_on_the_wire():
    link = LinkState(LinkParams(channels=3, transmitters=2))
    first, second = _frame(0, 0), _frame(1, 2)
    assert link.in_flight() == []

    completion = link.begin_transmission(first, 0, 0, 0)
    link.begin_transmission(second, 2, 1, 0)
    assert link.in_flight() == [first, second]

    link.end_transmission(0, 0, completion)
    assert link.in_flight() == [second]
