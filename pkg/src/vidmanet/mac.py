"""Shared wireless medium and a simplified 802.11 DCF MAC.

What is modelled:

* carrier sense over the reception range, DIFS + slotted random backoff in
  ``[0, CW)`` that freezes while the medium is busy;
* half-duplex radios and no capture: any overlap of two receptions at a node
  corrupts both;
* unicast frames are ACKed after SIFS and retransmitted with binary
  exponential backoff up to ``retry_limit`` times, after which the routing
  layer is told the link broke;
* a minimal NAV: a node that decodes a unicast frame addressed to someone
  else stays off the air until the matching ACK slot has passed;
* broadcasts are sent once, never ACKed.

RTS/CTS, fading and an extended carrier-sense range are not modelled.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .phy import RadioParams, in_range_at

BROADCAST = -1

DATA, RREQ, RREP, RERR, DSDV_UPDATE, ACK = "DATA", "RREQ", "RREP", "RERR", "DSDV_UPDATE", "ACK"
PACKET_KINDS = (DATA, RREQ, RREP, RERR, DSDV_UPDATE, ACK)

IDLE, BACKOFF, WAIT_ACK = 0, 1, 2


@dataclass(frozen=True)
class MacParams:
    bitrate: float = 2e6
    slot: float = 20e-6
    sifs: float = 10e-6
    difs: float = 50e-6
    cw_min: int = 32
    cw_max: int = 1024
    retry_limit: int = 7
    overhead: float = 192e-6
    queue_limit: int = 50
    ack_bytes: int = 14

    def airtime(self, size: int) -> float:
        return size * 8 / self.bitrate + self.overhead

    @property
    def ack_airtime(self) -> float:
        return self.airtime(self.ack_bytes)


class Packet:
    """One frame on the air. DATA packets are video segments."""

    __slots__ = ("uid", "kind", "src", "dst", "prev_hop", "next_hop", "frame_id",
                 "segment_index", "size", "ttl", "sent_at", "payload")

    def __init__(self, uid, kind, src, dst, size, *, next_hop=BROADCAST, prev_hop=None,
                 frame_id=None, segment_index=None, ttl=64, sent_at=0.0, payload=None):
        if size <= 0:
            raise ValueError("packet size must be positive")
        if kind == DATA and (frame_id is None or segment_index is None):
            raise ValueError("DATA packets need frame_id and segment_index")
        self.uid = uid
        self.kind = kind
        self.src = src
        self.dst = dst
        self.prev_hop = src if prev_hop is None else prev_hop
        self.next_hop = next_hop
        self.frame_id = frame_id
        self.segment_index = segment_index
        self.size = size
        self.ttl = ttl
        self.sent_at = sent_at
        self.payload = payload

    def clone(self) -> "Packet":
        p = Packet.__new__(Packet)
        for name in Packet.__slots__:
            setattr(p, name, getattr(self, name))
        return p

    @property
    def broadcast(self) -> bool:
        return self.next_hop == BROADCAST

    def __repr__(self):
        return (f"Packet(uid={self.uid}, {self.kind}, {self.src}->{self.dst}, "
                f"hop {self.prev_hop}->{self.next_hop}, {self.size}B)")


class Transmission:
    __slots__ = ("sender", "packet", "start", "end", "receivers", "ack_for")

    def __init__(self, sender, packet, start, end, receivers, ack_for=None):
        self.sender = sender
        self.packet = packet
        self.start = start
        self.end = end
        self.receivers = receivers
        self.ack_for = ack_for  # (data uid, data sender) when this is an ACK


class ChannelStats:
    FIELDS = ("enqueued", "transmissions", "delivered", "collided", "dropped_queue", "dropped_retry")

    def __init__(self):
        self.counts = {k: dict.fromkeys(self.FIELDS, 0) for k in PACKET_KINDS}

    def add(self, kind: str, field: str, n: int = 1) -> None:
        self.counts[kind][field] += n

    def to_csv(self) -> str:
        lines = ["kind," + ",".join(self.FIELDS)]
        for kind in PACKET_KINDS:
            row = self.counts[kind]
            lines.append(kind + "," + ",".join(str(row[f]) for f in self.FIELDS))
        return "\n".join(lines) + "\n"


class Medium:
    """The shared channel: who hears whom, ongoing transmissions, statistics.

    ``positions`` is either an ``(n, 2)`` array (static) or a callable
    ``t -> (n, 2) array`` for moving nodes.
    """

    def __init__(self, engine, n_nodes: int, positions, radio: RadioParams | None = None,
                 params: MacParams | None = None):
        self.engine = engine
        self.n = n_nodes
        self.radio = radio or RadioParams()
        self.params = params or MacParams()
        self.stats = ChannelStats()
        self.macs: list[Mac] = []
        self.uids = itertools.count()
        self.drop_hook = None  # f(packet, reason) for end-to-end accounting
        self._rng = engine.rng("mac")
        if callable(positions):
            self._positions_at = positions
            self._static = None
        else:
            pos = np.asarray(positions, dtype=float)
            self._positions_at = lambda t: pos
            self._static = [self._compute_neighbors(pos, i) for i in range(n_nodes)]
        engine.register("mac.backoff", self._on_backoff)
        engine.register("mac.tx_end", self._on_tx_end)
        engine.register("mac.ack", self._on_ack_start)
        engine.register("mac.ack_timeout", self._on_ack_timeout)
        for i in range(n_nodes):
            self.macs.append(Mac(self, i))

    # -- geometry -----------------------------------------------------------
    def _compute_neighbors(self, pos, i) -> list[int]:
        d = np.hypot(pos[:, 0] - pos[i, 0], pos[:, 1] - pos[i, 1])
        return [j for j in range(len(pos)) if j != i and in_range_at(float(d[j]), self.radio)]

    def neighbors(self, i: int, t: float | None = None) -> list[int]:
        if self._static is not None:
            return self._static[i]
        t = self.engine.now if t is None else t
        return self._compute_neighbors(self._positions_at(t), i)

    def in_range(self, a: int, b: int, t: float | None = None) -> bool:
        return b in self.neighbors(a, t)

    def positions(self, t: float | None = None) -> np.ndarray:
        return self._positions_at(self.engine.now if t is None else t)

    def new_uid(self) -> int:
        return next(self.uids)

    def drop(self, pkt: Packet, reason: str) -> None:
        self.stats.add(pkt.kind, reason)
        if self.drop_hook is not None:
            self.drop_hook(pkt, reason)

    # -- transmission -------------------------------------------------------
    def start_tx(self, sender: "Mac", pkt: Packet, ack_for=None) -> Transmission:
        now = self.engine.now
        airtime = self.params.airtime(pkt.size)
        receivers = self.neighbors(sender.node)
        tx = Transmission(sender.node, pkt, now, now + airtime, receivers, ack_for)
        self.stats.add(pkt.kind, "transmissions")
        macs = self.macs
        # a radio that starts sending loses whatever it was receiving
        for other in sender.incoming:
            sender.incoming[other] = True
        sender.transmitting = True
        sender.freeze()
        for r in receivers:
            m = macs[r]
            incoming = m.incoming
            corrupted = m.transmitting
            if incoming:
                corrupted = True
                for other in incoming:
                    incoming[other] = True
            incoming[tx] = corrupted
            m.busy += 1
            if m.busy == 1:
                m.freeze()
        self.engine.schedule(tx.end, sender.node, "mac.tx_end", tx)
        return tx

    def _on_tx_end(self, ev) -> None:
        tx: Transmission = ev.data
        macs = self.macs
        sender = macs[tx.sender]
        sender.transmitting = False
        for r in tx.receivers:
            m = macs[r]
            m.busy -= 1
            corrupted = m.incoming.pop(tx)
            if corrupted:
                if tx.packet.next_hop in (r, BROADCAST):
                    self.stats.add(tx.packet.kind, "collided")
            else:
                m.receive(tx)
        sender.tx_done(tx)
        for r in tx.receivers:
            m = macs[r]
            if m.busy == 0 and not m.transmitting:
                m.resume()
        if sender.busy == 0 and not sender.transmitting:
            sender.resume()

    def _on_backoff(self, ev) -> None:
        self.macs[ev.target].backoff_expired(ev)

    def _on_ack_start(self, ev) -> None:
        self.macs[ev.target].send_ack(ev.data)

    def _on_ack_timeout(self, ev) -> None:
        self.macs[ev.target].ack_timeout(ev)


class Mac:
    """Per-node DCF state machine."""

    def __init__(self, medium: Medium, node: int):
        self.medium = medium
        self.engine = medium.engine
        self.p = medium.params
        self.node = node
        self.queue: deque[Packet] = deque()
        self.state = IDLE
        self.cw = self.p.cw_min
        self.retries = 0
        self.backoff_slots: int | None = None
        self.countdown_start = 0.0
        self.backoff_event = None
        self.ack_event = None
        self.busy = 0
        self.transmitting = False
        self.nav_until = 0.0
        self.incoming: dict[Transmission, bool] = {}
        self.last_uid: dict[int, int] = {}
        self.upper = None  # routing agent: on_receive(pkt), on_link_break(nbr, pkt)

    # -- queue --------------------------------------------------------------
    def enqueue(self, pkt: Packet) -> bool:
        stats = self.medium.stats
        if len(self.queue) >= self.p.queue_limit:
            self.medium.drop(pkt, "dropped_queue")
            return False
        stats.add(pkt.kind, "enqueued")
        self.queue.append(pkt)
        if self.state == IDLE:
            self._start_access()
        return True

    def purge(self, next_hop: int) -> list[Packet]:
        """Remove queued packets for ``next_hop`` (never the one in service)."""
        if not self.queue:
            return []
        in_service = self.queue[0] if self.state != IDLE else None
        keep, out = deque(), []
        for pkt in self.queue:
            if pkt is not in_service and pkt.next_hop == next_hop:
                out.append(pkt)
            else:
                keep.append(pkt)
        self.queue = keep
        return out

    # -- channel access -----------------------------------------------------
    def idle(self) -> bool:
        return self.busy == 0 and not self.transmitting

    def _start_access(self) -> None:
        if self.backoff_slots is None:
            self.backoff_slots = self.medium._rng.randrange(self.cw)
        self.state = BACKOFF
        if self.idle():
            self._schedule_countdown()

    def _schedule_countdown(self) -> None:
        now = self.engine.now
        self.countdown_start = max(now, self.nav_until) + self.p.difs
        self.backoff_event = self.engine.schedule(
            self.countdown_start + self.backoff_slots * self.p.slot, self.node, "mac.backoff")

    def freeze(self) -> None:
        ev = self.backoff_event
        if ev is None:
            return
        if ev.fire_at <= self.engine.now:
            return  # countdown ended in this very slot: too late to sense, it transmits anyway
        self.engine.cancel(ev)
        self.backoff_event = None
        elapsed = self.engine.now - self.countdown_start
        if elapsed > 0:
            done = int(math.floor(elapsed / self.p.slot + 1e-9))
            self.backoff_slots = max(0, self.backoff_slots - done)

    def resume(self) -> None:
        if self.state == BACKOFF and self.backoff_event is None:
            self._schedule_countdown()

    def backoff_expired(self, ev) -> None:
        if ev is not self.backoff_event:
            return
        self.backoff_event = None
        self.backoff_slots = None
        pkt = self.queue[0]
        if pkt.broadcast:
            self.state = IDLE  # becomes free again at tx_done
        else:
            self.state = WAIT_ACK
        pkt.sent_at = self.engine.now
        self.medium.start_tx(self, pkt)

    def tx_done(self, tx: Transmission) -> None:
        if tx.ack_for is not None:
            return
        pkt = tx.packet
        if pkt.broadcast:
            self.queue.popleft()
            self.medium.stats.add(pkt.kind, "delivered")
            self._next()
        else:
            p = self.p
            self.ack_event = self.engine.schedule(
                self.engine.now + p.sifs + p.ack_airtime + p.slot, self.node, "mac.ack_timeout", pkt.uid)

    def _next(self) -> None:
        self.state = IDLE
        self.cw = self.p.cw_min
        self.retries = 0
        self.backoff_slots = None
        if self.queue:
            self._start_access()

    def ack_timeout(self, ev) -> None:
        if ev is not self.ack_event:
            return
        self.ack_event = None
        self.retries += 1
        pkt = self.queue[0]
        if self.retries > self.p.retry_limit:
            self.queue.popleft()
            self.state = IDLE
            self.cw = self.p.cw_min
            self.retries = 0
            self.backoff_slots = None
            self.medium.drop(pkt, "dropped_retry")
            if self.upper is not None:
                self.upper.on_link_break(pkt.next_hop, pkt)
            if self.state == IDLE and self.queue:
                self._start_access()
            return
        self.cw = min(self.cw * 2, self.p.cw_max)
        self.backoff_slots = None
        self._start_access()

    # -- reception ----------------------------------------------------------
    def receive(self, tx: Transmission) -> None:
        pkt = tx.packet
        if tx.ack_for is not None:
            uid, dst = tx.ack_for
            if dst == self.node and self.state == WAIT_ACK and self.queue and self.queue[0].uid == uid:
                self.engine.cancel(self.ack_event)
                self.ack_event = None
                done = self.queue.popleft()
                self.medium.stats.add(done.kind, "delivered")
                self._next()
            return
        if pkt.broadcast:
            if self.upper is not None:
                self.upper.on_receive(pkt.clone())
            return
        p = self.p
        if pkt.next_hop != self.node:
            self.nav_until = max(self.nav_until, self.engine.now + p.sifs + p.ack_airtime)
            return
        self.engine.schedule(self.engine.now + p.sifs, self.node, "mac.ack", (pkt.uid, tx.sender))
        if self.last_uid.get(tx.sender) == pkt.uid:
            return
        self.last_uid[tx.sender] = pkt.uid
        if self.upper is not None:
            self.upper.on_receive(pkt.clone())

    def send_ack(self, ack_for) -> None:
        uid, dst = ack_for
        ack = Packet(-1, ACK, self.node, dst, self.p.ack_bytes, next_hop=dst)
        self.medium.start_tx(self, ack, ack_for=ack_for)
