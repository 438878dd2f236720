"""Scenarios: grid placement, radial mobility, the video agents and a full run."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import aodv, dsdv
from .aodv import AodvParams, AodvRouter
from .dsdv import DsdvParams, DsdvRouter
from .engine import Engine
from .errors import ConfigError, NotPerfectSquare
from .mac import DATA, ChannelStats, MacParams, Medium, Packet
from .phy import RadioParams
from .routing import Network, RouteLog
from .video import (Concealment, MetricSeries, PsnrCache, PsnrConfig, ReconstructedVideo,
                    SegmentLog, SizeModel, VideoTrace, YuvSequence, evaluate, generate_trace,
                    reconstruct)

NODE_COUNTS = (4, 9, 16, 25, 36, 49, 64)
SPACINGS = (20.0, 50.0, 100.0, 150.0)


class Protocol(str, enum.Enum):
    AODV = "AODV"
    DSDV = "DSDV"


class Mobility(str, enum.Enum):
    STATIC = "STATIC"
    OUTWARD = "OUTWARD"
    INWARD = "INWARD"


MOBILITY_DEFAULTS = {Mobility.OUTWARD: (20.0, 150.0), Mobility.INWARD: (150.0, 20.0)}


@dataclass
class ScenarioConfig:
    protocol: Protocol = Protocol.AODV
    n_nodes: int = 4
    spacing: float = 20.0
    mobility: Mobility = Mobility.STATIC
    d_start: float | None = None
    d_end: float | None = None
    fps: float = 30.0
    n_frames: int = 2000
    mtu: int = 1024
    gop_len: int = 30
    sender: int | None = None
    receiver: int | None = None
    seed: int = 1
    drain_time: float = 5.0
    concealment: Concealment = Concealment.REPEAT_LAST
    theta: float = 0.05
    radio: RadioParams = field(default_factory=RadioParams)
    mac: MacParams = field(default_factory=MacParams)
    aodv: AodvParams = field(default_factory=AodvParams)
    dsdv: DsdvParams = field(default_factory=DsdvParams)
    size_model: SizeModel = field(default_factory=SizeModel)

    def __post_init__(self):
        self.protocol = _coerce(Protocol, self.protocol)
        self.mobility = _coerce(Mobility, self.mobility)
        if not isinstance(self.concealment, Concealment):
            self.concealment = Concealment(str(self.concealment).lower())

    @property
    def side(self) -> int:
        return grid_side(self.n_nodes)

    @property
    def src(self) -> int:
        return 0 if self.sender is None else self.sender

    @property
    def dst(self) -> int:
        return self.n_nodes - 1 if self.receiver is None else self.receiver

    @property
    def duration(self) -> float:
        return self.n_frames / self.fps

    @property
    def spacings(self) -> tuple[float, float]:
        """(start, end) grid spacing."""
        if self.mobility is Mobility.STATIC:
            return self.spacing, self.spacing
        ds, de = MOBILITY_DEFAULTS[self.mobility]
        return (ds if self.d_start is None else self.d_start,
                de if self.d_end is None else self.d_end)

    def validate(self) -> "ScenarioConfig":
        grid_side(self.n_nodes)
        if self.n_nodes < 2:
            raise ConfigError("need at least two nodes")
        for name in ("fps", "drain_time"):
            if not getattr(self, name) >= 0 or (name == "fps" and self.fps == 0):
                raise ConfigError(f"{name} must be positive")
        if self.n_frames < 1 or self.mtu < 1 or self.gop_len < 1:
            raise ConfigError("n_frames, mtu and gop_len must be >= 1")
        if not 0 <= self.src < self.n_nodes or not 0 <= self.dst < self.n_nodes:
            raise ConfigError("sender/receiver out of range")
        if self.src == self.dst:
            raise ConfigError("sender and receiver must differ")
        ds, de = self.spacings
        if ds <= 0 or de <= 0:
            raise ConfigError("spacing must be positive")
        if self.mobility is not Mobility.STATIC and ds == de:
            raise ConfigError("mobile scenarios need d_start != d_end")
        if not 0 < self.theta <= 1:
            raise ConfigError("theta must be in (0, 1]")
        return self


def _coerce(cls, value):
    if isinstance(value, cls):
        return value
    try:
        return cls(str(value).upper())
    except ValueError:
        raise ConfigError(f"unknown {cls.__name__.lower()} {value!r}") from None


def grid_side(n_nodes: int) -> int:
    side = math.isqrt(n_nodes) if n_nodes >= 0 else -1
    if side < 1 or side * side != n_nodes:
        raise NotPerfectSquare(f"n_nodes={n_nodes} is not a perfect square")
    return side


def matrix_topology(n_nodes: int, spacing: float) -> np.ndarray:
    """Row-major square grid: node ``r * side + c`` sits at ``(c * D, r * D)``."""
    side = grid_side(n_nodes)
    ids = np.arange(n_nodes)
    return np.column_stack([(ids % side) * float(spacing), (ids // side) * float(spacing)])


@dataclass
class MobilityPlan:
    """Grid scaled about its centre, spacing moving linearly from d_start to d_end over T."""

    initial: np.ndarray
    d_start: float
    d_end: float
    duration: float
    static: bool = False

    @property
    def center(self) -> np.ndarray:
        return self.initial.mean(axis=0)

    def spacing_at(self, t: float) -> float:
        if self.static or self.duration <= 0:
            return self.d_start
        t = min(max(t, 0.0), self.duration)
        return self.d_start + (self.d_end - self.d_start) * t / self.duration

    def positions_at(self, t: float) -> np.ndarray:
        if self.static:
            return self.initial
        c = self.center
        return c + (self.spacing_at(t) / self.d_start) * (self.initial - c)

    @classmethod
    def for_config(cls, cfg: ScenarioConfig) -> "MobilityPlan":
        ds, de = cfg.spacings
        return cls(matrix_topology(cfg.n_nodes, ds), ds, de, cfg.duration,
                   static=cfg.mobility is Mobility.STATIC)


def position_at(plan: MobilityPlan, node: int, t: float) -> tuple[float, float]:
    x, y = plan.positions_at(t)[node]
    return float(x), float(y)


# -- agents -----------------------------------------------------------------

class VideoSender:
    """Traffic source + UDP agent: segments each frame at its generation time."""

    def __init__(self, engine: Engine, node: int, dest: int, trace: VideoTrace, router,
                 log: SegmentLog | None = None, on_send=None):
        self.engine = engine
        self.node = node
        self.dest = dest
        self.trace = trace
        self.router = router
        self.log = log if log is not None else SegmentLog()
        self.on_send = on_send
        self.uids = router.net.medium.uids

    def start(self) -> None:
        if len(self.trace):
            self.engine.schedule(self.trace[0].gen_time, self.node, "app.frame", 0)

    def on_frame(self, ev) -> None:
        fid = ev.data
        now = self.engine.now
        for seg, size in enumerate(self.trace.segment_sizes(fid)):
            pkt = Packet(next(self.uids), DATA, self.node, self.dest, size,
                         frame_id=fid, segment_index=seg, sent_at=now)
            self.log.append(now, pkt.uid, fid, seg)
            if self.on_send is not None:
                self.on_send(pkt)
            self.router.send(pkt)
        if fid + 1 < len(self.trace):
            self.engine.schedule(self.trace[fid + 1].gen_time, self.node, "app.frame", fid + 1)


class VideoSink:
    """Receiving agent: logs each distinct DATA segment once."""

    def __init__(self, node: int, log: SegmentLog | None = None, on_receive=None):
        self.node = node
        self.log = log if log is not None else SegmentLog()
        self.on_receive = on_receive
        self._seen: set[tuple[int, int]] = set()

    def receive(self, pkt: Packet, now: float) -> None:
        if pkt.kind != DATA or pkt.dst != self.node:
            return
        key = (pkt.frame_id, pkt.segment_index)
        if key in self._seen:
            return
        self._seen.add(key)
        self.log.append(now, pkt.uid, pkt.frame_id, pkt.segment_index)
        if self.on_receive is not None:
            self.on_receive(pkt)


# -- building and running ---------------------------------------------------

FATES = ("delivered", "dropped_queue", "dropped_retry", "dropped_routing", "in_flight")


class FateBook:
    """End-to-end outcome of every DATA packet; a delivery outranks any drop of a copy."""

    def __init__(self):
        self.fate: dict[int, str] = {}

    def sent(self, pkt: Packet) -> None:
        self.fate[pkt.uid] = "in_flight"

    def dropped(self, pkt: Packet, reason: str) -> None:
        if pkt.kind == DATA and self.fate.get(pkt.uid) != "delivered":
            self.fate[pkt.uid] = reason

    def delivered(self, pkt: Packet) -> None:
        self.fate[pkt.uid] = "delivered"

    def counts(self) -> dict[str, int]:
        out = dict.fromkeys(FATES, 0)
        for v in self.fate.values():
            out[v] += 1
        return out


@dataclass
class Simulation:
    """A wired-up network ready to run (exposed for tests and custom experiments)."""

    cfg: ScenarioConfig
    engine: Engine
    medium: Medium
    net: Network
    routers: list
    plan: MobilityPlan
    fates: FateBook


def build_network(cfg: ScenarioConfig, record_events: bool = False) -> Simulation:
    cfg.validate()
    engine = Engine(cfg.seed, record=record_events)
    plan = MobilityPlan.for_config(cfg)
    positions = plan.initial if plan.static else plan.positions_at
    medium = Medium(engine, cfg.n_nodes, positions, cfg.radio, cfg.mac)
    net = Network(engine, medium, RouteLog())
    fates = FateBook()
    medium.drop_hook = fates.dropped
    if cfg.protocol is Protocol.AODV:
        routers = [AodvRouter(i, net, cfg.aodv) for i in range(cfg.n_nodes)]
        aodv.register(engine, routers)
    else:
        routers = [DsdvRouter(i, net, cfg.dsdv) for i in range(cfg.n_nodes)]
        dsdv.register(engine, routers)
        for r in routers:
            r.start()
    net.routers = routers
    return Simulation(cfg, engine, medium, net, routers, plan, fates)


@dataclass
class RunResult:
    config: ScenarioConfig
    trace: VideoTrace
    sender_log: SegmentLog
    receiver_log: SegmentLog
    recon: ReconstructedVideo
    metrics: MetricSeries
    channel: ChannelStats
    route_log: RouteLog
    fates: dict[str, int]
    first_frame_time: float | None
    first_route_time: float | None
    events: int
    event_log: list[str] = field(default_factory=list)

    def summary(self) -> dict[str, object]:
        m = self.metrics
        jit = m.jitter_values
        cfg = self.config
        return {
            "protocol": cfg.protocol.value,
            "n_nodes": cfg.n_nodes,
            "spacing": cfg.spacing,
            "mobility": cfg.mobility.value,
            "seed": cfg.seed,
            "frames": len(self.trace),
            "segments_sent": len(self.sender_log),
            "segments_received": len(self.receiver_log),
            "loss_rate": m.loss_rate,
            "decodable_rate": m.decodable_rate,
            "extractable": m.extractable,
            "mean_psnr_db": float(np.mean(m.psnr)) if len(m.psnr) else float("nan"),
            "mean_abs_jitter_s": float(np.mean(np.abs(jit))) if len(jit) else float("nan"),
            "first_frame_time_s": self.first_frame_time,
            "first_route_time_s": self.first_route_time,
            "events": self.events,
            **{f"data_{k}": v for k, v in self.fates.items()},
        }


def run_scenario(cfg: ScenarioConfig, source: YuvSequence, trace: VideoTrace | None = None,
                 psnr_cache: PsnrCache | None = None, record_events: bool = False) -> RunResult:
    """Simulate one video flow end to end and evaluate what arrived."""
    sim = build_network(cfg, record_events)
    if len(source) < cfg.n_frames:
        raise ConfigError(f"source has {len(source)} frames, config asks for {cfg.n_frames}")
    source = source.head(cfg.n_frames)
    if trace is None:
        trace = generate_trace(source, cfg.fps, cfg.gop_len, cfg.mtu, cfg.size_model)
    engine, net, fates = sim.engine, sim.net, sim.fates
    sink = VideoSink(cfg.dst, on_receive=fates.delivered)
    net.sinks[cfg.dst] = sink
    sender = VideoSender(engine, cfg.src, cfg.dst, trace, sim.routers[cfg.src], on_send=fates.sent)
    engine.register("app.frame", sender.on_frame)
    sender.start()
    engine.run_until(trace.duration + cfg.drain_time)

    recon = reconstruct(trace, sender.log, sink.log, source, cfg.concealment)
    cache = psnr_cache or PsnrCache(source, PsnrConfig(bits=source.bits))
    metrics = evaluate(trace, sender.log, sink.log, recon, cfg.theta, cache.cfg, cache)
    delivered_at = metrics.delay + np.array([e.gen_time for e in trace.entries])
    first_frame = float(np.nanmin(delivered_at)) if metrics.delivered.any() else None
    first_route = next((e.time for e in net.route_log.events
                        if e.node == cfg.src and e.dest == cfg.dst and e.event == "install"), None)
    return RunResult(cfg, trace, sender.log, sink.log, recon, metrics, sim.medium.stats,
                     net.route_log, fates.counts(), first_frame, first_route, engine.executed,
                     engine.log)
