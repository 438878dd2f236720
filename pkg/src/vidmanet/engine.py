"""Discrete-event kernel: clock, ordered event queue and seeded random streams.

Events are plain descriptors ``(fire_at, seq, target, kind, data)``. Handlers
are registered per ``kind`` and receive the event; nothing in the queue is a
closure, so an execution trace can be dumped line by line.

Random streams use Python's Mersenne Twister (``random.Random``) seeded with
the first 8 bytes of ``sha256(f"{seed}:{name}")``. Each subsystem asks for its
own named stream, so extra draws in one subsystem never shift another.
"""
from __future__ import annotations

import hashlib
import heapq
import random
from typing import Any, Callable

from .errors import SchedulingInPast

PENDING, FIRED, CANCELLED = 0, 1, 2


def derive_seed(seed: int, *names: Any) -> int:
    """Stable 64-bit seed derived from ``seed`` and a tuple of labels."""
    key = ":".join([str(int(seed))] + [str(n) for n in names]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


class Event:
    __slots__ = ("fire_at", "seq", "target", "kind", "data", "state")

    def __init__(self, fire_at: float, seq: int, target: int, kind: str, data: Any = None):
        self.fire_at = fire_at
        self.seq = seq
        self.target = target
        self.kind = kind
        self.data = data
        self.state = PENDING

    @property
    def pending(self) -> bool:
        return self.state == PENDING

    def __lt__(self, other: "Event") -> bool:
        return (self.fire_at, self.seq) < (other.fire_at, other.seq)

    def __repr__(self) -> str:
        return f"Event({self.fire_at:.9f}, {self.seq}, {self.target}, {self.kind!r})"


class Engine:
    """Single-threaded event loop.

    >>> eng = Engine(seed=1)
    >>> seen = []
    >>> eng.register("ping", lambda ev: seen.append(ev.target))
    >>> _ = eng.schedule(1.0, 7, "ping")
    >>> eng.run_until(2.0), seen, eng.now
    (1, [7], 2.0)
    """

    def __init__(self, seed: int = 0, record: bool = False):
        self.seed = int(seed)
        self.now = 0.0
        self._queue: list[tuple[float, int, Event]] = []
        self._seq = 0
        self._handlers: dict[str, Callable[[Event], None]] = {}
        self._streams: dict[str, random.Random] = {}
        self.executed = 0
        self.record = record
        self.log: list[str] = []

    # -- randomness ---------------------------------------------------------
    def rng(self, name: str) -> random.Random:
        stream = self._streams.get(name)
        if stream is None:
            stream = self._streams[name] = random.Random(derive_seed(self.seed, name))
        return stream

    # -- scheduling ---------------------------------------------------------
    def register(self, kind: str, handler: Callable[[Event], None]) -> None:
        self._handlers[kind] = handler

    def schedule(self, fire_at: float, target: int, kind: str, data: Any = None) -> Event:
        if fire_at < self.now:
            raise SchedulingInPast(f"event {kind!r} at {fire_at!r} < now {self.now!r}")
        ev = Event(fire_at, self._seq, target, kind, data)
        self._seq += 1
        heapq.heappush(self._queue, (fire_at, ev.seq, ev))
        return ev

    def schedule_in(self, delay: float, target: int, kind: str, data: Any = None) -> Event:
        return self.schedule(self.now + delay, target, kind, data)

    @staticmethod
    def cancel(ev: Event | None) -> bool:
        if ev is None or ev.state != PENDING:
            return False
        ev.state = CANCELLED
        return True

    def pending_count(self) -> int:
        return sum(1 for _, _, ev in self._queue if ev.state == PENDING)

    def run_until(self, t_end: float) -> int:
        """Execute every pending event with ``fire_at <= t_end``; return how many ran."""
        if t_end < self.now:
            raise SchedulingInPast(f"run_until({t_end!r}) before now {self.now!r}")
        queue = self._queue
        handlers = self._handlers
        pop = heapq.heappop
        count = 0
        while queue and queue[0][0] <= t_end:
            fire_at, _, ev = pop(queue)
            if ev.state != PENDING:
                continue
            ev.state = FIRED
            self.now = fire_at
            if self.record:
                self.log.append(f"{fire_at:.9f} {ev.seq} {ev.target} {ev.kind}")
            handlers[ev.kind](ev)
            count += 1
        self.now = t_end
        self.executed += count
        return count

    def dump_log(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.log:
                fh.write(line + "\n")
