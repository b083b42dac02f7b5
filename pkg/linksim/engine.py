"""
Discrete-event engine: integer picosecond clock, event queue and run loop.
"""

import logging
import struct
from enum import IntEnum
from hashlib import blake2b
from heapq import heappop, heappush
from typing import Callable, Mapping, NamedTuple, Optional

from pydantic import BaseModel

from linksim.errors import InvariantViolation, UsageError

logger = logging.getLogger(__name__)

# SimTime is a plain int of picoseconds since simulation start.
SimTime = int

PS_PER_SECOND = 10**12
PS_PER_US = 10**6
PS_PER_NS = 10**3


def seconds_to_ps(seconds: float) -> SimTime:
    return int(round(seconds * PS_PER_SECOND))


def us_to_ps(microseconds: float) -> SimTime:
    return int(round(microseconds * PS_PER_US))


def ns_to_ps(nanoseconds: float) -> SimTime:
    return int(round(nanoseconds * PS_PER_NS))


def ps_to_seconds(ps: SimTime) -> float:
    return ps / PS_PER_SECOND


class EventKind(IntEnum):
    """Kind-class of an event. Lower value wins a timestamp tie."""

    TX_COMPLETION = 0
    FLOW_ARRIVAL = 1


class Event(NamedTuple):
    """
    A timestamped simulation event.

    Tuple order is the dispatch order: (time, kind-class, seq).
    For FLOW_ARRIVAL `a` is the flow id; for TX_COMPLETION `a` is the
    transmitter and `b` the channel.
    """

    time: SimTime
    kind: EventKind
    seq: int
    a: int
    b: int = -1


Handler = Callable[[Event], None]

_TRACE_RECORD = struct.Struct("<QBQqq")


class RunSummary(BaseModel):
    """Counts from one or more calls to Simulator.run()."""

    dispatched_arrivals: int = 0
    dispatched_completions: int = 0
    events_scheduled: int = 0
    events_pending: int = 0
    clock: int = 0
    trace_digest: Optional[str] = None

    @property
    def total_dispatched(self) -> int:
        return self.dispatched_arrivals + self.dispatched_completions


class Simulator:
    """Single-threaded deterministic event loop."""

    def __init__(self, trace: bool = False):
        self.now: SimTime = 0
        self._heap: list[Event] = []
        self._seq = 0
        self._dispatched = [0, 0]
        self._trace = blake2b(digest_size=16) if trace else None

    def __len__(self) -> int:
        return len(self._heap)

    @property
    def events_scheduled(self) -> int:
        return self._seq

    def schedule(self, time: SimTime, kind: EventKind, a: int, b: int = -1) -> Event:
        """
        Insert an event; the sequence number comes from the global counter.

        Raises:
            InvariantViolation: if time is before the current clock
        """
        if time < self.now:
            raise InvariantViolation(
                f"event {kind.name} scheduled at {time} ps, clock is {self.now} ps"
            )
        event = Event(time, kind, self._seq, a, b)
        self._seq += 1
        heappush(self._heap, event)
        return event

    def peek(self) -> Optional[Event]:
        return self._heap[0] if self._heap else None

    def pop(self) -> Event:
        """Remove and return the minimum-ordered event without dispatching it."""
        return heappop(self._heap)

    def run(self, until: SimTime, handlers: Mapping[EventKind, Handler]) -> RunSummary:
        """
        Dispatch events in order until the queue is empty or the next event
        lies beyond `until`. Handlers may schedule further events.

        Args:
            until: Last simulated instant (inclusive) to dispatch
            handlers: One handler per EventKind

        Returns:
            Cumulative RunSummary for this simulator
        """
        missing = [kind.name for kind in EventKind if kind not in handlers]
        if missing:
            raise UsageError(f"no handler registered for {', '.join(missing)}")

        dispatch = (handlers[EventKind.TX_COMPLETION], handlers[EventKind.FLOW_ARRIVAL])
        heap = self._heap
        counts = self._dispatched
        trace = self._trace
        pack = _TRACE_RECORD.pack

        while heap and heap[0][0] <= until:
            event = heappop(heap)
            time = event[0]
            if time < self.now:
                raise InvariantViolation(
                    f"clock went backwards: {time} ps after {self.now} ps"
                )
            self.now = time
            kind = event[1]
            counts[kind] += 1
            if trace is not None:
                trace.update(pack(time, kind, event[2], event[3], event[4]))
            dispatch[kind](event)

        summary = self.summary()
        logger.debug(
            "run until %d ps: %d events dispatched, %d pending",
            until,
            summary.total_dispatched,
            summary.events_pending,
        )
        return summary

    def summary(self) -> RunSummary:
        return RunSummary(
            dispatched_arrivals=self._dispatched[EventKind.FLOW_ARRIVAL],
            dispatched_completions=self._dispatched[EventKind.TX_COMPLETION],
            events_scheduled=self._seq,
            events_pending=len(self._heap),
            clock=self.now,
            trace_digest=self._trace.hexdigest() if self._trace is not None else None,
        )
