import numpy as np
import pytest

from vidmanet.engine import Engine
from vidmanet.mac import Medium
from vidmanet.routing import Network
from vidmanet.synth import synth_sequence, write_synth
from vidmanet.video import PsnrCache, generate_trace, load_yuv

CIF = (352, 288)
CLIP_FRAMES = 2000

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(label: str, ok: bool, detail: str) -> None:
        line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
        _VERDICTS.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def clip_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("clip") / "synth_cif.yuv"
    write_synth(path, CLIP_FRAMES, *CIF)
    return path


@pytest.fixture(scope="session")
def clip(clip_path):
    return load_yuv(clip_path, *CIF)


@pytest.fixture(scope="session")
def clip_trace(clip):
    return generate_trace(clip)


@pytest.fixture(scope="session")
def clip_cache(clip):
    return PsnrCache(clip)


@pytest.fixture(scope="session")
def small_clip():
    # same content at 64x48: keeps frame sizes realistic while PSNR stays cheap
    return synth_sequence(900, 64, 48)


def random_sequence(rng: np.random.Generator, n: int, width: int = 16, height: int = 16):
    from vidmanet.video import YuvSequence
    y = rng.integers(0, 256, (n, height, width), dtype=np.uint8)
    u = rng.integers(0, 256, (n, height // 2, width // 2), dtype=np.uint8)
    v = rng.integers(0, 256, (n, height // 2, width // 2), dtype=np.uint8)
    return YuvSequence(width, height, y, u, v)


class Probe:
    """Stand-in routing agent that records what its MAC hands up."""

    def __init__(self):
        self.received = []
        self.breaks = []

    def on_receive(self, pkt):
        self.received.append(pkt)

    def on_link_break(self, neighbor, pkt):
        self.breaks.append((neighbor, pkt.uid))


def bare_medium(positions, seed=1, params=None):
    eng = Engine(seed)
    med = Medium(eng, len(positions), np.asarray(positions, dtype=float), params=params)
    probes = [Probe() for _ in positions]
    for mac, probe in zip(med.macs, probes):
        mac.upper = probe
    return eng, med, probes


def routed(router_cls, register, positions, params=None, seed=1):
    eng = Engine(seed)
    pos = positions if callable(positions) else np.asarray(positions, dtype=float)
    n = len(positions(0.0)) if callable(positions) else len(positions)
    med = Medium(eng, n, pos)
    drops = []
    med.drop_hook = lambda pkt, reason: drops.append((pkt.uid, pkt.kind, reason))
    net = Network(eng, med)
    routers = [router_cls(i, net, params) for i in range(n)]
    register(eng, routers)
    net.routers = routers
    return eng, med, net, routers, drops
