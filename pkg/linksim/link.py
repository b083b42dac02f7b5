"""
Hybrid TDM/WDM link: W wavelength channels, each ending in a fixed receiver,
shared by M tunable transmitters.
"""

from dataclasses import dataclass
from typing import Optional

from linksim.engine import PS_PER_SECOND, SimTime
from linksim.errors import InvariantViolation, UsageError
from linksim.models import MAX_FRAME_BYTES, LinkParams


@dataclass(slots=True)
class Frame:
    """An Ethernet frame and its lifecycle timestamps."""

    id: int
    channel_id: int
    size_bytes: int
    t_created: SimTime
    t_enqueued: SimTime
    t_tx_start: Optional[SimTime] = None
    t_delivered: Optional[SimTime] = None


@dataclass(slots=True)
class ChannelState:
    channel_id: int
    line_rate_bps: int
    busy: bool = False
    current_transmitter: Optional[int] = None
    current_frame: Optional[Frame] = None
    busy_since: SimTime = 0
    busy_ps: SimTime = 0
    # (t_tx_start, completion) of the last frame, for the non-overlap check
    last_window: tuple[SimTime, SimTime] = (0, 0)


@dataclass(slots=True)
class TransmitterState:
    transmitter_id: int
    busy: bool = False
    current_channel: Optional[int] = None
    completion_time: Optional[SimTime] = None
    last_channel: Optional[int] = None
    busy_since: SimTime = 0
    busy_ps: SimTime = 0


def transmission_duration(size_bytes: int, ifg_bytes: int, line_rate_bps: int) -> SimTime:
    """
    Channel occupancy of one frame plus its inter-frame gap.

    Returns:
        (size_bytes + ifg_bytes) * 8 * 10^12 / line_rate_bps picoseconds,
        rounded half-up
    """
    if size_bytes < 1:
        raise UsageError(f"frame size must be positive, got {size_bytes}")
    if line_rate_bps < 1:
        raise UsageError(f"line rate must be positive, got {line_rate_bps}")
    quotient, remainder = divmod((size_bytes + ifg_bytes) * 8 * PS_PER_SECOND, line_rate_bps)
    return quotient + (1 if 2 * remainder >= line_rate_bps else 0)


class LinkState:
    """Occupancy of channels and transmitters."""

    def __init__(self, params: LinkParams):
        self.params = params
        self.channels = [
            ChannelState(channel_id=i, line_rate_bps=params.line_rate_bps)
            for i in range(params.channels)
        ]
        self.transmitters = [TransmitterState(transmitter_id=i) for i in range(params.transmitters)]
        self.busy_transmitters = 0
        # Durations for every legal size, indexed by size in bytes
        self._durations = [0] + [
            transmission_duration(size, params.ifg_bytes, params.line_rate_bps)
            for size in range(1, MAX_FRAME_BYTES + 1)
        ]

    def duration(self, size_bytes: int) -> SimTime:
        if 0 < size_bytes <= MAX_FRAME_BYTES:
            return self._durations[size_bytes]
        return transmission_duration(size_bytes, self.params.ifg_bytes, self.params.line_rate_bps)

    def acquire_transmitter(self) -> Optional[int]:
        """Lowest-indexed idle transmitter, or None when all are busy. Does not mutate."""
        if self.busy_transmitters == len(self.transmitters):
            return None
        for tx in self.transmitters:
            if not tx.busy:
                return tx.transmitter_id
        return None

    def begin_transmission(
        self,
        frame: Frame,
        channel_id: int,
        transmitter_id: int,
        now: SimTime,
    ) -> SimTime:
        """
        Pair an idle transmitter with an idle channel and start sending.

        Returns:
            Completion time; the caller schedules the TX_COMPLETION event

        Raises:
            InvariantViolation: if the channel or transmitter is busy
        """
        channel = self.channels[channel_id]
        tx = self.transmitters[transmitter_id]
        if channel.busy:
            raise InvariantViolation(
                f"channel {channel_id} already busy with transmitter {channel.current_transmitter}"
            )
        if tx.busy:
            raise InvariantViolation(
                f"transmitter {transmitter_id} already busy on channel {tx.current_channel}"
            )

        start = now
        tuning = self.params.tuning_time_ps
        if tuning and tx.last_channel is not None and tx.last_channel != channel_id:
            start += tuning
        if start < channel.last_window[1]:
            raise InvariantViolation(
                f"channel {channel_id} overlap: start {start} ps before previous end "
                f"{channel.last_window[1]} ps"
            )
        completion = start + self.duration(frame.size_bytes)

        channel.busy = True
        channel.current_transmitter = transmitter_id
        channel.current_frame = frame
        channel.busy_since = now
        channel.last_window = (start, completion)
        tx.busy = True
        tx.current_channel = channel_id
        tx.completion_time = completion
        tx.last_channel = channel_id
        tx.busy_since = now
        self.busy_transmitters += 1

        frame.t_tx_start = start
        return completion

    def end_transmission(self, transmitter_id: int, channel_id: int, now: SimTime) -> Frame:
        """
        Release a transmitter/channel pair at the end of a transmission.

        Returns:
            The frame that was in flight, stamped with its delivery time

        Raises:
            InvariantViolation: if the pair is not currently busy together
        """
        channel = self.channels[channel_id]
        tx = self.transmitters[transmitter_id]
        if not tx.busy or tx.current_channel != channel_id:
            raise InvariantViolation(
                f"end of transmission on channel {channel_id} by transmitter {transmitter_id}, "
                f"which is serving {tx.current_channel}"
            )
        if channel.current_transmitter != transmitter_id:
            raise InvariantViolation(
                f"channel {channel_id} is paired with transmitter {channel.current_transmitter}"
            )

        frame = channel.current_frame
        channel.busy = False
        channel.current_transmitter = None
        channel.current_frame = None
        channel.busy_ps += now - channel.busy_since
        tx.busy = False
        tx.current_channel = None
        tx.completion_time = None
        tx.busy_ps += now - tx.busy_since
        self.busy_transmitters -= 1

        frame.t_delivered = now
        return frame

    def in_flight(self) -> list[Frame]:
        return [ch.current_frame for ch in self.channels if ch.current_frame is not None]

    def utilization(self, elapsed: SimTime) -> list[float]:
        """Fraction of `elapsed` each channel spent occupied (completed frames only)."""
        if elapsed <= 0:
            return [0.0] * len(self.channels)
        return [ch.busy_ps / elapsed for ch in self.channels]

    def check_invariants(self) -> None:
        """Raise InvariantViolation if pairing or busy counts are inconsistent."""
        busy_channels = 0
        for ch in self.channels:
            if ch.busy != (ch.current_transmitter is not None):
                raise InvariantViolation(f"channel {ch.channel_id} busy flag disagrees with pairing")
            if ch.busy:
                busy_channels += 1
                tx = self.transmitters[ch.current_transmitter]
                if tx.current_channel != ch.channel_id:
                    raise InvariantViolation(
                        f"channel {ch.channel_id} and transmitter {tx.transmitter_id} disagree"
                    )
        busy_tx = 0
        for tx in self.transmitters:
            flags = (tx.busy, tx.current_channel is not None, tx.completion_time is not None)
            if len(set(flags)) != 1:
                raise InvariantViolation(f"transmitter {tx.transmitter_id} state is inconsistent")
            busy_tx += tx.busy
        if busy_tx != busy_channels or busy_tx != self.busy_transmitters:
            raise InvariantViolation(
                f"{busy_tx} busy transmitters, {busy_channels} busy channels, "
                f"counter says {self.busy_transmitters}"
            )
        if busy_tx > len(self.transmitters):
            raise InvariantViolation("more busy pairs than transmitters")
