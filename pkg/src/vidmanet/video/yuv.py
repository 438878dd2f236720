"""Raw planar YUV 4:2:0 (I420) sequences."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import BadDimensions, TruncatedFile


def _dtype(bits: int) -> np.dtype:
    if not 1 <= bits <= 16:
        raise BadDimensions(f"unsupported bit depth {bits}")
    return np.dtype(np.uint8) if bits <= 8 else np.dtype("<u2")


def frame_bytes(width: int, height: int, bits: int = 8) -> int:
    return width * height * 3 // 2 * _dtype(bits).itemsize


@dataclass
class YuvSequence:
    """Planes are ``(n, h, w)`` for Y and ``(n, h/2, w/2)`` for U and V."""

    width: int
    height: int
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    bits: int = 8

    def __post_init__(self):
        _check_dims(self.width, self.height)
        n = len(self.y)
        h, w = self.height, self.width
        if self.y.shape != (n, h, w) or self.u.shape != (n, h // 2, w // 2) or self.v.shape != self.u.shape:
            raise BadDimensions(f"plane shapes {self.y.shape}, {self.u.shape}, {self.v.shape} "
                                f"do not match {w}x{h}")

    @classmethod
    def empty(cls, width: int, height: int, bits: int = 8) -> "YuvSequence":
        dt = _dtype(bits)
        return cls(width, height, np.zeros((0, height, width), dt),
                   np.zeros((0, height // 2, width // 2), dt),
                   np.zeros((0, height // 2, width // 2), dt), bits)

    @classmethod
    def from_frames(cls, frames, width: int, height: int, bits: int = 8) -> "YuvSequence":
        frames = list(frames)
        if not frames:
            return cls.empty(width, height, bits)
        dt = _dtype(bits)
        y = np.stack([np.asarray(f[0], dt) for f in frames])
        u = np.stack([np.asarray(f[1], dt) for f in frames])
        v = np.stack([np.asarray(f[2], dt) for f in frames])
        return cls(width, height, y, u, v, bits)

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_frames(self) -> int:
        return len(self.y)

    @property
    def peak(self) -> int:
        return (1 << self.bits) - 1

    def frame(self, i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.y[i], self.u[i], self.v[i]

    def head(self, n: int) -> "YuvSequence":
        return YuvSequence(self.width, self.height, self.y[:n], self.u[:n], self.v[:n], self.bits)

    def validate(self) -> None:
        for plane in (self.y, self.u, self.v):
            if plane.size and int(plane.max()) > self.peak:
                raise BadDimensions(f"sample above {self.peak} for {self.bits}-bit video")

    def black_frame(self):
        dt = self.y.dtype
        mid = 1 << (self.bits - 1)
        return (np.zeros((self.height, self.width), dt),
                np.full((self.height // 2, self.width // 2), mid, dt),
                np.full((self.height // 2, self.width // 2), mid, dt))

    def zero_frame(self):
        dt = self.y.dtype
        return (np.zeros((self.height, self.width), dt),
                np.zeros((self.height // 2, self.width // 2), dt),
                np.zeros((self.height // 2, self.width // 2), dt))


def _check_dims(width: int, height: int) -> None:
    if width <= 0 or height <= 0 or width % 2 or height % 2:
        raise BadDimensions(f"width and height must be positive and even, got {width}x{height}")


def load_yuv(path, width: int, height: int, bits: int = 8, mmap: bool = True) -> YuvSequence:
    """Open a headerless I420 file. Large files are memory-mapped read-only."""
    _check_dims(width, height)
    dt = _dtype(bits)
    fb = frame_bytes(width, height, bits)
    size = os.path.getsize(path)
    if size % fb:
        raise TruncatedFile(f"{path}: {size} bytes is not a multiple of the {fb}-byte frame")
    n = size // fb
    if n == 0:
        return YuvSequence.empty(width, height, bits)
    per_frame = fb // dt.itemsize
    if mmap:
        raw = np.memmap(path, dtype=dt, mode="r", shape=(n, per_frame))
    else:
        raw = np.fromfile(path, dtype=dt).reshape(n, per_frame)
    ys, cs = width * height, (width // 2) * (height // 2)
    y = raw[:, :ys].reshape(n, height, width)
    u = raw[:, ys:ys + cs].reshape(n, height // 2, width // 2)
    v = raw[:, ys + cs:].reshape(n, height // 2, width // 2)
    return YuvSequence(width, height, y, u, v, bits)


def write_frames(fh, frames, bits: int = 8) -> None:
    dt = _dtype(bits)
    for y, u, v in frames:
        for plane in (y, u, v):
            fh.write(np.ascontiguousarray(plane, dtype=dt).tobytes())


def store_yuv(seq: YuvSequence, path) -> None:
    with open(path, "wb") as fh:
        write_frames(fh, (seq.frame(i) for i in range(len(seq))), seq.bits)
