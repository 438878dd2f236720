"""Proactive distance-vector routing with destination sequence numbers.

Every node broadcasts its full table each ``update_period`` and sends a small
triggered update when a known destination is reported broken or comes back
with a fresh sequence number. Newly learned routes settle before they are
re-advertised, so first-time convergence proceeds at the pace of the
periodic dumps. Even sequence numbers are issued by the
destination itself; a node that loses its next hop bumps the stored number to
the next odd value and advertises an infinite metric.

There is no discovery: data for an unknown destination is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .mac import DATA, DSDV_UPDATE, Packet
from .routing import Network, Router

INF = math.inf
HEADER_BYTES, ENTRY_BYTES = 20, 12


@dataclass(frozen=True)
class DsdvParams:
    update_period: float = 15.0
    settling_time: float = 6.0
    startup_jitter: float = 1.0
    periodic_jitter: float = 0.5  # each period is update_period +/- this much
    triggered_jitter: float = 0.01

    def __post_init__(self):
        if not self.update_period > 0:
            raise ValueError("update_period must be > 0")
        if not 0 <= self.periodic_jitter < self.update_period:
            raise ValueError("periodic_jitter must be in [0, update_period)")
        if min(self.settling_time, self.startup_jitter, self.triggered_jitter) < 0:
            raise ValueError("DSDV timers must be >= 0")


@dataclass
class DsdvRouteEntry:
    dest: int
    next_hop: int
    metric: float
    dest_seq: int
    installed_at: float
    settle_until: float = 0.0

    @property
    def reachable(self) -> bool:
        return self.metric < INF and self.dest_seq % 2 == 0


@dataclass(frozen=True)
class DsdvUpdate:
    sender: int
    entries: tuple[tuple[int, float, int], ...]
    full_dump: bool


class DsdvRouter(Router):
    def __init__(self, node: int, net: Network, params: DsdvParams | None = None):
        super().__init__(node, net)
        self.params = params or DsdvParams()
        self.seq = 0
        self.table: dict[int, DsdvRouteEntry] = {
            node: DsdvRouteEntry(node, node, 0, 0, 0.0)}
        self.changed: set[int] = set()
        self.trigger_event = None
        self.periodic_event = None
        self.updates_sent = 0

    def start(self) -> None:
        delay = self.rng.uniform(0, self.params.startup_jitter)
        self.periodic_event = self.engine.schedule_in(delay, self.node, "dsdv.periodic")

    # -- lookup -------------------------------------------------------------
    def dsdv_route_lookup(self, dest: int) -> int | None:
        if dest == self.node:
            return self.node
        r = self.table.get(dest)
        if r is None or not r.reachable:
            return None
        return r.next_hop

    route_lookup = dsdv_route_lookup

    # -- advertisements -----------------------------------------------------
    def _advertised(self, dests) -> tuple[tuple[int, float, int], ...]:
        now = self.engine.now
        out = []
        for d in sorted(dests):
            r = self.table[d]
            if d != self.node and r.settle_until > now:
                continue
            out.append((d, r.metric, r.dest_seq))
        return tuple(out)

    def periodic_update(self) -> None:
        self.seq += 2
        own = self.table[self.node]
        own.dest_seq = self.seq
        self._broadcast(DsdvUpdate(self.node, self._advertised(self.table), True))
        self.changed.clear()
        # re-jittered every round so hidden neighbours never stay phase-locked
        delay = self.params.update_period + self.rng.uniform(-1, 1) * self.params.periodic_jitter
        self.periodic_event = self.engine.schedule_in(delay, self.node, "dsdv.periodic")

    def _trigger(self, dest: int) -> None:
        self.changed.add(dest)
        if self.trigger_event is None:
            delay = self.rng.uniform(0, self.params.triggered_jitter)
            self.trigger_event = self.engine.schedule_in(delay, self.node, "dsdv.triggered")

    def on_triggered(self, ev) -> None:
        self.trigger_event = None
        if not self.changed:
            return
        dests = set(self.changed) | {self.node}
        self.changed.clear()
        self._broadcast(DsdvUpdate(self.node, self._advertised(dests), False))

    def _broadcast(self, msg: DsdvUpdate) -> None:
        size = HEADER_BYTES + ENTRY_BYTES * len(msg.entries)
        pkt = Packet(self.net.medium.new_uid(), DSDV_UPDATE, self.node, -1, size, payload=msg, ttl=1)
        self.updates_sent += 1
        self.mac.enqueue(pkt)

    # -- incoming -----------------------------------------------------------
    def process_update(self, msg: DsdvUpdate, sender: int) -> None:
        now = self.engine.now
        settle = self.params.settling_time
        for dest, metric, seq in msg.entries:
            if dest == self.node:
                continue
            new_metric = metric + 1 if metric < INF else INF
            broken = seq % 2 == 1 or new_metric == INF
            r = self.table.get(dest)
            if r is None:
                if broken:
                    continue
                # first sighting: wait out the settling time and the next full dump
                self.table[dest] = DsdvRouteEntry(dest, sender, new_metric, seq, now, now + settle)
                self.log("install", dest, new_metric)
                continue
            if seq < r.dest_seq:
                continue
            if broken:
                if seq > r.dest_seq:
                    was = r.reachable
                    self._set(r, r.next_hop, INF, seq)
                    if was:
                        self.log("expire", dest, INF)
                        self._trigger(dest)
                continue
            if seq > r.dest_seq:
                was = r.reachable
                old_metric = r.metric
                self._set(r, sender, new_metric, seq)
                r.installed_at = now
                if not was:
                    r.settle_until = 0.0
                    self.log("install", dest, new_metric)
                    self._trigger(dest)
                elif new_metric <= old_metric:
                    r.settle_until = 0.0
                else:
                    r.settle_until = now + settle
            elif new_metric < r.metric:
                self._set(r, sender, new_metric, seq)
                r.installed_at = now
                r.settle_until = now + settle
                self.log("install", dest, new_metric)

    def _set(self, r: DsdvRouteEntry, next_hop, metric, seq) -> None:
        if seq < r.dest_seq:
            raise AssertionError(f"node {self.node}: seq for {r.dest} fell {r.dest_seq} -> {seq}")
        r.next_hop, r.metric, r.dest_seq = next_hop, metric, seq

    def dsdv_link_break(self, neighbor: int) -> list[int]:
        lost = []
        for dest, r in self.table.items():
            if dest != self.node and r.next_hop == neighbor and r.reachable:
                self._set(r, neighbor, INF, r.dest_seq + 1)
                lost.append(dest)
                self.log("break", dest, INF)
        for d in lost:
            self._trigger(d)
        return lost

    # -- data path ----------------------------------------------------------
    def send(self, pkt: Packet) -> None:
        self._route_data(pkt)

    def _route_data(self, pkt: Packet) -> None:
        if pkt.dst == self.node:
            self.net.deliver(self.node, pkt)
            return
        nh = self.dsdv_route_lookup(pkt.dst)
        if nh is None:
            self.net.drop(pkt)
            return
        pkt.prev_hop = self.node
        pkt.next_hop = nh
        self.mac.enqueue(pkt)

    def on_receive(self, pkt: Packet) -> None:
        if pkt.kind == DATA:
            pkt.ttl -= 1
            if pkt.dst != self.node and pkt.ttl <= 0:
                self.net.drop(pkt)
                return
            self._route_data(pkt)
        elif pkt.kind == DSDV_UPDATE:
            self.process_update(pkt.payload, pkt.prev_hop)

    def on_link_break(self, neighbor: int, pkt: Packet) -> None:
        self.dsdv_link_break(neighbor)
        for p in self.mac.purge(neighbor):
            if p.kind == DATA:
                self._route_data(p)
            else:
                self.net.drop(p)


def register(engine, routers: list[DsdvRouter]) -> None:
    engine.register("dsdv.periodic", lambda ev: routers[ev.target].periodic_update())
    engine.register("dsdv.triggered", lambda ev: routers[ev.target].on_triggered(ev))
