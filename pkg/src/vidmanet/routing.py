"""Glue shared by the routing agents: the network context and the route-event log."""
from __future__ import annotations

from dataclasses import dataclass, field

from .mac import Medium, Packet


@dataclass
class RouteEvent:
    time: float
    node: int
    event: str  # discover | install | expire | rerr | break | fail
    dest: int
    hop_count: float


@dataclass
class RouteLog:
    events: list[RouteEvent] = field(default_factory=list)
    enabled: bool = True

    def add(self, time, node, event, dest, hop_count) -> None:
        if self.enabled:
            self.events.append(RouteEvent(time, node, event, dest, hop_count))

    def to_csv(self) -> str:
        lines = ["time,node,event,dest,hop_count"]
        for e in self.events:
            hc = "inf" if e.hop_count == float("inf") else str(int(e.hop_count))
            lines.append(f"{e.time:.9f},{e.node},{e.event},{e.dest},{hc}")
        return "\n".join(lines) + "\n"


class Network:
    """Everything a routing agent needs to reach outside its own node."""

    def __init__(self, engine, medium: Medium, route_log: RouteLog | None = None):
        self.engine = engine
        self.medium = medium
        self.route_log = route_log or RouteLog()
        self.sinks: dict[int, object] = {}
        self.routers: list = []

    @property
    def n(self) -> int:
        return self.medium.n

    def deliver(self, node: int, pkt: Packet) -> None:
        sink = self.sinks.get(node)
        if sink is not None:
            sink.receive(pkt, self.engine.now)

    def drop(self, pkt: Packet, reason: str = "dropped_routing") -> None:
        hook = self.medium.drop_hook
        if hook is not None:
            hook(pkt, reason)


class Router:
    """Base class: binds a routing agent to its node's MAC."""

    def __init__(self, node: int, net: Network):
        self.node = node
        self.net = net
        self.engine = net.engine
        self.mac = net.medium.macs[node]
        self.mac.upper = self
        self.rng = net.engine.rng(f"routing.{node}")

    def log(self, event: str, dest: int, hop_count) -> None:
        self.net.route_log.add(self.engine.now, self.node, event, dest, hop_count)

    def send(self, pkt: Packet) -> None:
        raise NotImplementedError

    def on_receive(self, pkt: Packet) -> None:
        raise NotImplementedError

    def on_link_break(self, neighbor: int, pkt: Packet) -> None:
        raise NotImplementedError
