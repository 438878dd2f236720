"""Per-frame quality and timing metrics: PSNR, delay, jitter, loss."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from .logs import SegmentLog
from .reconstruct import BLACK, ZERO, ReconstructedVideo
from .trace import VideoTrace


@dataclass(frozen=True)
class PsnrConfig:
    bits: int = 8
    cap_db: float = 100.0

    def __post_init__(self):
        if self.v_peak < 1:
            raise ValueError("bits must be >= 1")
        # a single unit error in a CIF luma plane already gives ~98 dB at 8 bits
        if self.cap_db <= 20 * math.log10(self.v_peak):
            raise ValueError("cap_db must exceed the PSNR of a one-pixel unit error")

    @property
    def v_peak(self) -> int:
        return 2 ** self.bits - 1


def psnr_from_sse(sse: int, n: int, cfg: PsnrConfig) -> float:
    if sse == 0:
        return cfg.cap_db
    return 20 * math.log10(cfg.v_peak / math.sqrt(sse / n))


def psnr_frame(src_y, dst_y, cfg: PsnrConfig = PsnrConfig()) -> float:
    """PSNR of two luminance planes, in dB; ``cfg.cap_db`` when they are identical."""
    a = np.asarray(src_y)
    b = np.asarray(dst_y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    d = a.astype(np.int64).ravel() - b.astype(np.int64).ravel()
    return psnr_from_sse(int(d @ d), d.size, cfg)


class PsnrCache:
    """Memoises PSNR between source frame pairs; identical pairs never touch pixels."""

    def __init__(self, source, cfg: PsnrConfig = PsnrConfig()):
        self.source = source
        self.cfg = cfg
        self._pairs: dict[tuple[int, int], float] = {}
        self._black: np.ndarray | None = None

    def __call__(self, i: int, j: int) -> float:
        if i == j:
            return self.cfg.cap_db
        key = (i, j)
        val = self._pairs.get(key)
        if val is None:
            if j in (BLACK, ZERO):
                other = np.zeros_like(self.source.y[i])
            else:
                other = self.source.y[j]
            val = self._pairs[key] = psnr_frame(self.source.y[i], other, self.cfg)
        return val


def psnr_series(recon: ReconstructedVideo, cfg: PsnrConfig = PsnrConfig(),
                cache: PsnrCache | None = None) -> np.ndarray:
    cache = cache or PsnrCache(recon.source, cfg)
    return np.array([cache(i, int(j)) for i, j in enumerate(recon.shown)], dtype=np.float64)


def _jitter_pairs(sender_log: SegmentLog, receiver_log: SegmentLog, frames=None,
                  cumulative: bool = False) -> list[tuple[int, float]]:
    sent = sender_log.frame_times(last=False)
    recv = receiver_log.frame_times(last=True)
    ids = sorted(f for f in recv if f in sent and (frames is None or f in frames))
    out = []
    total = 0.0
    for prev, cur in zip(ids, ids[1:]):
        j = (recv[cur] - recv[prev]) - (sent[cur] - sent[prev])
        total += j
        out.append((cur, total if cumulative else j))
    return out


def jitter_series(sender_log: SegmentLog, receiver_log: SegmentLog, cumulative: bool = False,
                  frames=None) -> list[float]:
    """Signed inter-arrival minus inter-departure time over consecutive received frames.

    A frame is received at its last segment and sent at its first. ``frames``
    optionally restricts the computation to a set of frame ids.
    """
    return [j for _, j in _jitter_pairs(sender_log, receiver_log, frames, cumulative)]


def delivered_frames(trace: VideoTrace, receiver_log: SegmentLog) -> set[int]:
    got: dict[int, set[int]] = {}
    for r in receiver_log:
        got.setdefault(r.frame_id, set()).add(r.segment_index)
    return {f for f, segs in got.items() if 0 <= f < len(trace) and len(segs) >= trace[f].n_segments}


def delay_and_loss(trace: VideoTrace, sender_log: SegmentLog,
                   receiver_log: SegmentLog) -> tuple[dict[int, float], float]:
    """Delay of each fully delivered frame (last segment minus generation time) and the frame loss rate."""
    done = delivered_frames(trace, receiver_log)
    recv = receiver_log.frame_times(last=True)
    delays = {f: recv[f] - trace[f].gen_time for f in sorted(done)}
    loss = 1.0 - len(done) / len(trace) if len(trace) else 0.0
    return delays, loss


def moving_average(series, window: int = 100) -> np.ndarray:
    """Trailing mean over ``window`` samples; the first samples average what exists."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    c = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(1, x.size + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


def extractability(recon: ReconstructedVideo, theta: float = 0.05) -> bool:
    if not 0 < theta <= 1:
        raise ValueError("theta must be in (0, 1]")
    return recon.decodable_ratio >= theta


@dataclass
class MetricSeries:
    psnr: np.ndarray
    delay: np.ndarray
    jitter: np.ndarray
    delivered: np.ndarray
    decodable: np.ndarray
    loss_rate: float
    decodable_rate: float
    extractable: bool

    def to_csv(self) -> str:
        def cell(x):
            return "" if np.isnan(x) else f"{x:.9f}"
        lines = ["frame,delivered,decodable,psnr_db,delay_s,jitter_s"]
        for i in range(len(self.psnr)):
            lines.append(f"{i},{int(self.delivered[i])},{int(self.decodable[i])},"
                         f"{cell(self.psnr[i])},{cell(self.delay[i])},{cell(self.jitter[i])}")
        return "\n".join(lines) + "\n"

    @property
    def jitter_values(self) -> np.ndarray:
        return self.jitter[~np.isnan(self.jitter)]


def evaluate(trace: VideoTrace, sender_log: SegmentLog, receiver_log: SegmentLog,
             recon: ReconstructedVideo, theta: float = 0.05, cfg: PsnrConfig = PsnrConfig(),
             cache: PsnrCache | None = None) -> MetricSeries:
    n = len(trace)
    psnr = psnr_series(recon, cfg, cache)
    delays, loss = delay_and_loss(trace, sender_log, receiver_log)
    delay = np.full(n, np.nan)
    for f, d in delays.items():
        delay[f] = d
    jitter = np.full(n, np.nan)
    for f, j in _jitter_pairs(sender_log, receiver_log, frames=set(delays)):
        jitter[f] = j
    delivered = np.zeros(n, dtype=bool)
    delivered[list(delays)] = True
    return MetricSeries(psnr, delay, jitter, delivered, recon.decodable, loss,
                        recon.decodable_ratio, extractability(recon, theta))
