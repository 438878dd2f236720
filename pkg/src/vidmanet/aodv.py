"""Reactive routing: flooded route requests, unicast replies along the reverse
path, route errors on MAC-detected link breaks.

No expanding ring, local repair, HELLO beacons or gratuitous replies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DiscoveryFailed
from .mac import BROADCAST, DATA, RERR, RREP, RREQ, Packet
from .routing import Network, Router

RREQ_SIZE, RREP_SIZE, RERR_BASE, RERR_PER_DEST = 44, 40, 32, 8


@dataclass(frozen=True)
class AodvParams:
    active_route_timeout: float = 10.0
    rrep_wait: float = 1.0
    rreq_retries: int = 2
    buffer_limit: int = 64
    buffer_timeout: float = 30.0
    broadcast_jitter: float = 0.01
    ttl: int | None = None  # None: 2 * sqrt(n)


@dataclass
class AodvRouteEntry:
    dest: int
    next_hop: int
    hop_count: int
    dest_seq: int
    expires_at: float
    valid: bool = True


@dataclass(frozen=True)
class RreqMessage:
    origin: int
    origin_seq: int
    rreq_id: int
    dest: int
    known_dest_seq: int | None
    hop_count: int
    ttl: int


@dataclass(frozen=True)
class RrepMessage:
    origin: int
    dest: int
    dest_seq: int
    hop_count: int
    lifetime: float


@dataclass(frozen=True)
class RerrMessage:
    unreachable: tuple[tuple[int, int], ...]


class AodvRouter(Router):
    def __init__(self, node: int, net: Network, params: AodvParams | None = None):
        super().__init__(node, net)
        self.params = params or AodvParams()
        self.seq = 0
        self.rreq_id = 0
        self.routes: dict[int, AodvRouteEntry] = {}
        self.seen: set[tuple[int, int]] = set()
        self.answered: dict[tuple[int, int], int] = {}  # (origin, rreq_id) -> hop count replied to
        self.pending: dict[int, tuple[int, object]] = {}  # dest -> (attempt, timer)
        self.buffer: list[tuple[float, Packet]] = []
        ttl = self.params.ttl
        self.ttl = ttl if ttl is not None else max(1, math.ceil(2 * math.sqrt(net.n)))
        self.max_seq_seen: dict[int, int] = {}
        self.failures: list[DiscoveryFailed] = []  # recorded, never raised mid-run

    # -- table --------------------------------------------------------------
    def route_lookup(self, dest: int) -> AodvRouteEntry | None:
        if dest == self.node:
            return AodvRouteEntry(dest, self.node, 0, self.seq, math.inf)
        r = self.routes.get(dest)
        if r is None or not r.valid:
            return None
        if r.expires_at <= self.engine.now:
            r.valid = False
            self.log("expire", dest, r.hop_count)
            return None
        return r

    def _update(self, dest, next_hop, hop_count, seq, lifetime) -> bool:
        """Install or refresh a route when the offer is fresher or shorter."""
        now = self.engine.now
        r = self.routes.get(dest)
        if r is not None:
            live = r.valid and r.expires_at > now
            better = (seq > r.dest_seq or (seq == r.dest_seq and hop_count < r.hop_count)
                      or not live)
            if not better:
                if live and seq == r.dest_seq and next_hop == r.next_hop:
                    r.expires_at = max(r.expires_at, now + lifetime)
                return False
            seq = max(seq, r.dest_seq)
            r.next_hop, r.hop_count, r.dest_seq = next_hop, hop_count, seq
            r.expires_at, r.valid = now + lifetime, True
        else:
            self.routes[dest] = AodvRouteEntry(dest, next_hop, hop_count, seq, now + lifetime)
        self._note_seq(dest, seq)
        self.log("install", dest, hop_count)
        return True

    def _note_seq(self, dest, seq) -> None:
        prev = self.max_seq_seen.get(dest, -1)
        if seq < prev:
            raise AssertionError(f"node {self.node}: seq for {dest} fell {prev} -> {seq}")
        self.max_seq_seen[dest] = seq

    def _touch(self, r: AodvRouteEntry) -> None:
        r.expires_at = max(r.expires_at, self.engine.now + self.params.active_route_timeout)

    # -- data path ----------------------------------------------------------
    def send(self, pkt: Packet) -> None:
        self._route_data(pkt, originated=True)

    def _route_data(self, pkt: Packet, originated: bool) -> None:
        if pkt.dst == self.node:
            self.net.deliver(self.node, pkt)
            return
        r = self.route_lookup(pkt.dst)
        if r is None:
            if originated:
                self._buffer(pkt)
                self.originate_discovery(pkt.dst)
            else:
                self.net.drop(pkt)
                known = self.routes.get(pkt.dst)
                seq = known.dest_seq if known is not None else 0
                self._send_rerr(((pkt.dst, seq),))
            return
        self._touch(r)
        nh = self.routes.get(r.next_hop)
        if nh is not None and nh.valid:
            self._touch(nh)
        pkt.prev_hop = self.node
        pkt.next_hop = r.next_hop
        self.mac.enqueue(pkt)

    def _buffer(self, pkt: Packet) -> None:
        if len(self.buffer) >= self.params.buffer_limit:
            self.net.drop(pkt)
            return
        self.buffer.append((self.engine.now, pkt))

    def _flush(self, dest: int) -> None:
        now = self.engine.now
        keep, ready = [], []
        for t, pkt in self.buffer:
            if pkt.dst != dest:
                keep.append((t, pkt))
            elif now - t > self.params.buffer_timeout:
                self.net.drop(pkt)
            else:
                ready.append(pkt)
        self.buffer = keep
        for pkt in ready:
            self._route_data(pkt, originated=True)

    # -- discovery ----------------------------------------------------------
    def originate_discovery(self, dest: int, attempt: int = 0) -> None:
        if attempt == 0 and dest in self.pending:
            return
        self.seq += 1
        self.rreq_id += 1
        old = self.routes.get(dest)
        msg = RreqMessage(self.node, self.seq, self.rreq_id, dest,
                          old.dest_seq if old is not None else None, 0, self.ttl)
        self.seen.add((self.node, self.rreq_id))
        timer = self.engine.schedule_in(self.params.rrep_wait, self.node, "aodv.rrep_wait", (dest, attempt))
        self.pending[dest] = (attempt, timer)
        self.log("discover", dest, 0)
        self._broadcast(RREQ, RREQ_SIZE, dest, msg)

    def on_rrep_wait(self, ev) -> None:
        dest, attempt = ev.data
        cur = self.pending.get(dest)
        if cur is None or cur[1] is not ev:
            return
        if self.route_lookup(dest) is not None:
            del self.pending[dest]
            self._flush(dest)
            return
        if attempt < self.params.rreq_retries:
            self.originate_discovery(dest, attempt + 1)
            return
        del self.pending[dest]
        self.log("fail", dest, 0)
        keep, dropped = [], 0
        for t, pkt in self.buffer:
            if pkt.dst == dest:
                self.net.drop(pkt)
                dropped += 1
            else:
                keep.append((t, pkt))
        self.buffer = keep
        self.failures.append(DiscoveryFailed(
            f"node {self.node}: no route to {dest} after {attempt + 1} floods, {dropped} packets dropped"))

    def _broadcast(self, kind, size, dest, msg, jitter=0.0) -> None:
        pkt = Packet(self.net.medium.new_uid(), kind, self.node, dest, size, payload=msg, ttl=1)
        if jitter > 0:
            self.engine.schedule_in(self.rng.uniform(0, jitter), self.node, "aodv.bcast", pkt)
        else:
            self.mac.enqueue(pkt)

    def on_bcast(self, ev) -> None:
        self.mac.enqueue(ev.data)

    def _unicast(self, kind, size, dest, next_hop, msg) -> None:
        pkt = Packet(self.net.medium.new_uid(), kind, self.node, dest, size,
                     next_hop=next_hop, payload=msg)
        self.mac.enqueue(pkt)

    # -- control messages ---------------------------------------------------
    def on_receive(self, pkt: Packet) -> None:
        kind = pkt.kind
        if kind == DATA:
            pkt.ttl -= 1
            if pkt.dst != self.node and pkt.ttl <= 0:
                self.net.drop(pkt)
                return
            self._route_data(pkt, originated=False)
        elif kind == RREQ:
            self.handle_rreq(pkt.payload, pkt.prev_hop)
        elif kind == RREP:
            self.handle_rrep(pkt.payload, pkt.prev_hop)
        elif kind == RERR:
            self.handle_rerr(pkt.payload, pkt.prev_hop)

    def _neighbor_route(self, nbr: int) -> None:
        r = self.routes.get(nbr)
        seq = r.dest_seq if r is not None else 0
        self._update(nbr, nbr, 1, seq, self.params.active_route_timeout)

    def handle_rreq(self, msg: RreqMessage, sender: int) -> None:
        key = (msg.origin, msg.rreq_id)
        if key in self.seen:
            # never re-flooded; the destination still answers a strictly shorter copy
            if msg.dest == self.node and msg.hop_count < self.answered.get(key, -1):
                self._reply_as_dest(msg, sender)
            return
        self.seen.add(key)
        if msg.origin == self.node:
            return
        if msg.dest == self.node:
            if msg.known_dest_seq is not None and msg.known_dest_seq > self.seq:
                self.seq = msg.known_dest_seq
            self._reply_as_dest(msg, sender)
            return
        timeout = self.params.active_route_timeout
        self._neighbor_route(sender)
        self._update(msg.origin, sender, msg.hop_count + 1, msg.origin_seq, timeout)
        r = self.route_lookup(msg.dest)
        if r is not None and (msg.known_dest_seq is None or r.dest_seq >= msg.known_dest_seq):
            rep = RrepMessage(msg.origin, msg.dest, r.dest_seq, r.hop_count,
                              r.expires_at - self.engine.now)
            self._unicast(RREP, RREP_SIZE, msg.origin, sender, rep)
            return
        if msg.ttl - 1 <= 0:
            return
        fwd = RreqMessage(msg.origin, msg.origin_seq, msg.rreq_id, msg.dest,
                          msg.known_dest_seq, msg.hop_count + 1, msg.ttl - 1)
        self._broadcast(RREQ, RREQ_SIZE, msg.dest, fwd, jitter=self.params.broadcast_jitter)

    def _reply_as_dest(self, msg: RreqMessage, sender: int) -> None:
        timeout = self.params.active_route_timeout
        self._neighbor_route(sender)
        self._update(msg.origin, sender, msg.hop_count + 1, msg.origin_seq, timeout)
        self.answered[(msg.origin, msg.rreq_id)] = msg.hop_count
        rep = RrepMessage(msg.origin, self.node, self.seq, 0, timeout)
        self._unicast(RREP, RREP_SIZE, msg.origin, sender, rep)

    def handle_rrep(self, msg: RrepMessage, sender: int) -> None:
        self._neighbor_route(sender)
        hops = msg.hop_count + 1
        self._update(msg.dest, sender, hops, msg.dest_seq, max(msg.lifetime, self.params.active_route_timeout))
        if msg.origin == self.node:
            cur = self.pending.pop(msg.dest, None)
            if cur is not None:
                self.engine.cancel(cur[1])
            self._flush(msg.dest)
            return
        back = self.route_lookup(msg.origin)
        if back is None:
            return
        self._touch(back)
        fwd = RrepMessage(msg.origin, msg.dest, msg.dest_seq, hops, msg.lifetime)
        self._unicast(RREP, RREP_SIZE, msg.origin, back.next_hop, fwd)

    def handle_rerr(self, msg: RerrMessage, sender: int) -> None:
        lost = []
        for dest, seq in msg.unreachable:
            r = self.routes.get(dest)
            if r is not None and r.valid and r.next_hop == sender:
                r.valid = False
                r.dest_seq = max(r.dest_seq, seq)
                self._note_seq(dest, r.dest_seq)
                lost.append((dest, r.dest_seq))
                self.log("rerr", dest, r.hop_count)
        if lost:
            self._send_rerr(tuple(lost))

    def _send_rerr(self, unreachable) -> None:
        size = RERR_BASE + RERR_PER_DEST * len(unreachable)
        self._broadcast(RERR, size, BROADCAST, RerrMessage(tuple(unreachable)))

    # -- link maintenance ---------------------------------------------------
    def handle_link_break(self, neighbor: int) -> list[int]:
        lost = []
        for dest, r in self.routes.items():
            if r.valid and r.next_hop == neighbor:
                r.valid = False
                r.dest_seq += 1
                self._note_seq(dest, r.dest_seq)
                lost.append((dest, r.dest_seq))
                self.log("break", dest, r.hop_count)
        if lost:
            self._send_rerr(tuple(lost))
        return [d for d, _ in lost]

    def on_link_break(self, neighbor: int, pkt: Packet) -> None:
        self.handle_link_break(neighbor)
        stranded = self.mac.purge(neighbor)
        for p in stranded:
            if p.kind == DATA and p.src == self.node:
                self._route_data(p, originated=True)
            else:
                self.net.drop(p)


def register(engine, routers: list[AodvRouter]) -> None:
    engine.register("aodv.rrep_wait", lambda ev: routers[ev.target].on_rrep_wait(ev))
    engine.register("aodv.bcast", lambda ev: routers[ev.target].on_bcast(ev))
