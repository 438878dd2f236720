"""Frame traces: what the sender actually puts on the network.

There is no real encoder. Frame sizes come from a surrogate model driven by
picture content, so dark or still frames cost fewer bytes:

    I frame: base_i + alpha * mean|Y - mean(Y)|
    P frame: base_p + beta  * mean|Y_t - Y_{t-1}|

both clamped to ``[min_size, max_size]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import VideoError
from .yuv import YuvSequence

I_FRAME, P_FRAME = "I", "P"


@dataclass(frozen=True)
class SizeModel:
    base_i: float = 6000.0
    base_p: float = 1500.0
    alpha: float = 60.0
    beta: float = 140.0
    min_size: int = 200
    max_size: int = 30000

    def clamp(self, size: float) -> int:
        return int(min(max(round(size), self.min_size), self.max_size))


@dataclass(frozen=True)
class TraceEntry:
    frame_id: int
    frame_type: str
    size: int
    n_segments: int
    gen_time: float


@dataclass
class VideoTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    fps: float = 30.0
    mtu: int = 1024
    gop_len: int = 30

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> TraceEntry:
        return self.entries[i]

    def segment_sizes(self, frame_id: int) -> list[int]:
        e = self.entries[frame_id]
        sizes = [self.mtu] * (e.n_segments - 1)
        sizes.append(e.size - self.mtu * (e.n_segments - 1))
        return sizes

    @property
    def duration(self) -> float:
        return len(self.entries) / self.fps

    @property
    def total_segments(self) -> int:
        return sum(e.n_segments for e in self.entries)

    def bitrate(self) -> float:
        if not self.entries:
            return 0.0
        return 8 * sum(e.size for e in self.entries) / self.duration

    def to_text(self) -> str:
        return "".join(f"{e.frame_id} {e.frame_type} {e.size} {e.n_segments} {e.gen_time:.6f}\n"
                       for e in self.entries)

    @classmethod
    def from_text(cls, text: str, fps: float = 30.0, mtu: int = 1024, gop_len: int = 30) -> "VideoTrace":
        entries = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 5 or parts[1] not in (I_FRAME, P_FRAME):
                raise VideoError(f"trace line {lineno}: {line!r}")
            entries.append(TraceEntry(int(parts[0]), parts[1], int(parts[2]), int(parts[3]), float(parts[4])))
        for i, e in enumerate(entries):
            if e.frame_id != i:
                raise VideoError(f"trace frame ids must be consecutive from 0 (line {i + 1})")
        return cls(entries, fps, mtu, gop_len)


def spatial_activity(y: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64)
    return float(np.abs(y - y.mean()).mean())


def temporal_diff(y: np.ndarray, prev: np.ndarray) -> float:
    return float(np.abs(np.asarray(y, np.int32) - np.asarray(prev, np.int32)).mean())


def generate_trace(seq: YuvSequence, fps: float = 30.0, gop_len: int = 30, mtu: int = 1024,
                   model: SizeModel | None = None) -> VideoTrace:
    if len(seq) == 0:
        raise VideoError("cannot build a trace from an empty sequence")
    if gop_len < 1 or mtu < 1 or fps <= 0:
        raise ValueError("gop_len, mtu and fps must be positive")
    model = model or SizeModel()
    entries = []
    for i in range(len(seq)):
        y = seq.y[i]
        if i % gop_len == 0:
            kind, size = I_FRAME, model.clamp(model.base_i + model.alpha * spatial_activity(y))
        else:
            kind, size = P_FRAME, model.clamp(model.base_p + model.beta * temporal_diff(y, seq.y[i - 1]))
        entries.append(TraceEntry(i, kind, size, math.ceil(size / mtu), i / fps))
    return VideoTrace(entries, fps, mtu, gop_len)
