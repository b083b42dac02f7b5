"""
Shared helpers for the simulator tests.
"""

import itertools
from typing import Optional

import pytest

from linksim.link import Frame, LinkState
from linksim.models import LinkParams
from linksim.scheduler import MCDRRScheduler, RoundRobinScheduler


class Recorder:
    """Collects scheduler hook calls."""

    def __init__(self):
        self.transmits: list[tuple[int, int, int]] = []
        self.delivered: list[Frame] = []
        self.dropped: list[Frame] = []

    def on_transmit(self, completion: int, transmitter_id: int, channel_id: int) -> None:
        self.transmits.append((completion, transmitter_id, channel_id))

    def on_delivered(self, frame: Frame, now: int) -> None:
        self.delivered.append(frame)

    def on_dropped(self, frame: Frame, now: int) -> None:
        self.dropped.append(frame)


class Bench:
    """A link and scheduler without the event engine."""

    def __init__(
        self,
        channels: int,
        transmitters: int = 2,
        quantum: int = 1518,
        baseline: bool = False,
        **knobs,
    ):
        self.link = LinkState(LinkParams(channels=channels, transmitters=transmitters))
        self.recorder = Recorder()
        cls = RoundRobinScheduler if baseline else MCDRRScheduler
        self.scheduler = cls(
            self.link,
            [quantum] * channels,
            on_transmit=self.recorder.on_transmit,
            on_delivered=self.recorder.on_delivered,
            on_dropped=self.recorder.on_dropped,
            **knobs,
        )
        self._ids = itertools.count()

    def frame(self, channel_id: int, size: int, now: int = 0) -> Frame:
        return Frame(
            id=next(self._ids),
            channel_id=channel_id,
            size_bytes=size,
            t_created=now,
            t_enqueued=now,
        )

    def preload(self, sizes_by_queue: list[list[int]]) -> None:
        """Enqueue frames without triggering any selection."""
        for channel_id, sizes in enumerate(sizes_by_queue):
            for size in sizes:
                self.scheduler.enqueue(channel_id, self.frame(channel_id, size))

    def arrive(self, channel_id: int, size: int, now: int = 0):
        return self.scheduler.on_arrival(channel_id, self.frame(channel_id, size, now), now)

    def dc(self, channel_id: int) -> int:
        return self.scheduler.voqs[channel_id].dc

    def last_transmit(self) -> Optional[tuple[int, int, int]]:
        return self.recorder.transmits[-1] if self.recorder.transmits else None


@pytest.fixture
def bench_factory():
    return Bench
