"""
Per-flow renewal traffic: exponential interframe times, uniform or fixed
frame sizes, one reproducible random stream per flow.
"""

import itertools
import math
from typing import Iterator, NamedTuple, Optional, Protocol

import numpy as np

from linksim.engine import SimTime, us_to_ps
from linksim.link import Frame
from linksim.models import FixedSize, FlowSpec, UniformSize

_BLOCK = 4096


class UniformSource(Protocol):
    def random(self) -> float: ...

    def uniform_open(self) -> float: ...

    def integer(self, low: int, high: int) -> int: ...


class RngStream:
    """
    Pseudorandom stream for one flow.

    PCG64 seeded from SeedSequence(master_seed, spawn_key=(flow_id,)), so the
    stream depends only on the pair and not on how many other flows exist or
    in which order they draw. Doubles are drawn in blocks.
    """

    def __init__(self, master_seed: int, flow_id: int):
        self.master_seed = master_seed
        self.flow_id = flow_id
        seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(flow_id,))
        self._gen = np.random.Generator(np.random.PCG64(seq))
        self._draws: Iterator[float] = iter(())

    def random(self) -> float:
        """Uniform on [0, 1)."""
        for value in self._draws:
            return value
        self._draws = iter(self._gen.random(_BLOCK).tolist())
        return next(self._draws)

    def uniform_open(self) -> float:
        """Uniform on (0, 1]."""
        return 1.0 - self.random()

    def integer(self, low: int, high: int) -> int:
        """Uniform integer on [low, high]."""
        return min(high, low + int(self.random() * (high - low + 1)))


def sample_interframe(spec: FlowSpec, rng: UniformSource) -> SimTime:
    """Exponential interframe time by inverse CDF, whole picoseconds, at least 1 ps."""
    value = -spec.mean_interframe_ps * math.log(rng.uniform_open())
    return max(1, int(value + 0.5))


def sample_frame_size(spec: FlowSpec, rng: UniformSource) -> int:
    size = spec.size
    if isinstance(size, FixedSize):
        return size.size_bytes
    return rng.integer(size.min_bytes, size.max_bytes)


class FlowGenerator:
    """Frame source for one flow. Never emits past `end_time`."""

    def __init__(
        self,
        spec: FlowSpec,
        master_seed: int,
        frame_ids: Iterator[int],
        end_time: SimTime,
    ):
        self.spec = spec
        self.rng = RngStream(master_seed, spec.flow_id)
        self.frame_ids = frame_ids
        self.end_time = end_time
        self.generated = 0
        # Hot path: the draws below repeat sample_interframe and sample_frame_size
        self._random = self.rng.random
        self._mean_ps = spec.mean_interframe_ps
        if isinstance(spec.size, FixedSize):
            self._fixed_size: Optional[int] = spec.size.size_bytes
        else:
            self._fixed_size = None
            self._low, self._high = spec.size.min_bytes, spec.size.max_bytes

    def first_arrival(self) -> Optional[SimTime]:
        return self.next_arrival(0)

    def next_arrival(self, now: SimTime) -> Optional[SimTime]:
        at = now + max(1, int(-self._mean_ps * math.log(1.0 - self._random()) + 0.5))
        return at if at <= self.end_time else None

    def _frame_size(self) -> int:
        if self._fixed_size is not None:
            return self._fixed_size
        low, high = self._low, self._high
        return min(high, low + int(self._random() * (high - low + 1)))

    def make_frame(self, now: SimTime) -> Frame:
        self.generated += 1
        return Frame(
            id=next(self.frame_ids),
            channel_id=self.spec.flow_id,
            size_bytes=self._frame_size(),
            t_created=now,
            t_enqueued=now,
        )


def frame_id_allocator() -> Iterator[int]:
    return itertools.count()


def scenario_a_flows(channels: int = 16) -> list[FlowSpec]:
    """Flow 0 every 16 us on average, the rest every 48 us; sizes uniform 64..1518."""
    return [
        FlowSpec(
            flow_id=i,
            mean_interframe_ps=us_to_ps(16 if i == 0 else 48),
            size=UniformSize(min_bytes=64, max_bytes=1518),
        )
        for i in range(channels)
    ]


def scenario_b_flows(channels: int = 16) -> list[FlowSpec]:
    """Flow 0: 1000-byte frames every 16 us; the rest: 500-byte frames every 32 us."""
    return [
        FlowSpec(
            flow_id=i,
            mean_interframe_ps=us_to_ps(16 if i == 0 else 32),
            size=FixedSize(size_bytes=1000 if i == 0 else 500),
        )
        for i in range(channels)
    ]


class Arrival(NamedTuple):
    """A scripted arrival: time, destination queue/channel, frame size."""

    time: SimTime
    queue: int
    size_bytes: int


WORKED_EXAMPLE_QUANTUM = 500


def worked_example_arrivals() -> list[Arrival]:
    """
    Four flows, quantum 500, one frame per visit, two transmitters.

    Round 1 holds 110/250/800/500-byte HOL frames. Flow 1 queues 150 and 200
    and flows 2 and 4 queue 100 and 150 for round 2; a 300-byte frame for
    flow 2 and a 200-byte frame for flow 3 arrive while flow 3's 800-byte
    frame is still on the wire.
    """
    return [
        Arrival(0, 0, 110),
        Arrival(0, 1, 250),
        Arrival(0, 2, 800),
        Arrival(0, 3, 500),
        Arrival(0, 0, 150),
        Arrival(0, 0, 200),
        Arrival(0, 1, 100),
        Arrival(0, 3, 150),
        Arrival(us_to_ps(5), 1, 300),
        Arrival(us_to_ps(5), 2, 200),
    ]
