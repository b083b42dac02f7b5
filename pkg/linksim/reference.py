"""
Single-server deficit round-robin, written as a plain timeline loop.

Used as an oracle: with one transmitter and every quantum at least the largest
frame, MCDRR must produce exactly the same service order. The round loop here
keeps cycling while any queue is backlogged, so a frame larger than its
quantum is still served once enough rounds have accrued.
"""

from collections import deque
from typing import NamedTuple, Sequence, Union

from linksim.link import transmission_duration
from linksim.traffic import Arrival


class Service(NamedTuple):
    queue: int
    frame: int  # index into the arrival list


def reference_drr_trace(
    queues: int,
    quantum: Union[int, Sequence[int]],
    arrivals: Sequence[Arrival],
    ifg_bytes: int = 12,
    line_rate_bps: int = 10**9,
) -> list[Service]:
    """
    Service order of classic DRR on one server with unbounded queues.

    The round pointer starts before queue 0. Each visit to a non-empty queue
    adds its quantum; if the deficit covers the head frame, every frame
    present whose size is still covered is sent back to back, and the deficit
    resets when the queue drains. A selection is attempted whenever the
    server becomes free and on every arrival while it is idle. A completion
    and an arrival at the same instant are handled completion first.

    Args:
        queues: Number of logical queues
        quantum: One quantum for all queues, or one per queue
        arrivals: Frames in arrival order (ties keep list order)
        ifg_bytes: Gap counted into each frame's service time
        line_rate_bps: Server rate

    Returns:
        (queue, arrival index) in the order frames were served
    """
    quanta = [quantum] * queues if isinstance(quantum, int) else list(quantum)
    order = sorted(range(len(arrivals)), key=lambda i: arrivals[i].time)
    backlog: list[deque] = [deque() for _ in range(queues)]
    deficit = [0] * queues
    pointer = queues - 1
    served: list[Service] = []

    busy_until = None
    batch_queue = -1
    batch_size = 0
    next_arrival = 0

    def select(now: int) -> None:
        nonlocal pointer, busy_until, batch_queue, batch_size
        # Keep going round while anything waits; every lap adds a quantum
        while any(backlog):
            for step in range(queues):
                q = (pointer + 1 + step) % queues
                if not backlog[q]:
                    continue
                deficit[q] += quanta[q]
                if deficit[q] < arrivals[backlog[q][0]].size_bytes:
                    continue
                pointer = q
                elapsed = 0
                batch_size = 0
                for index in backlog[q]:
                    size = arrivals[index].size_bytes
                    if size > deficit[q]:
                        break
                    deficit[q] -= size
                    served.append(Service(q, index))
                    elapsed += transmission_duration(size, ifg_bytes, line_rate_bps)
                    batch_size += 1
                batch_queue = q
                busy_until = now + elapsed
                return

    while True:
        arrival_pending = next_arrival < len(order)
        if busy_until is not None and (
            not arrival_pending or arrivals[order[next_arrival]].time >= busy_until
        ):
            now = busy_until
            busy_until = None
            for _ in range(batch_size):
                backlog[batch_queue].popleft()
            if not backlog[batch_queue]:
                deficit[batch_queue] = 0
            select(now)
        elif arrival_pending:
            index = order[next_arrival]
            next_arrival += 1
            arrival = arrivals[index]
            backlog[arrival.queue].append(index)
            if busy_until is None:
                select(arrival.time)
        else:
            break

    return served
