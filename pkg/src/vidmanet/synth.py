"""Deterministic synthetic test video.

A diagonal sinusoidal texture drifting slowly over a vertical luminance ramp,
a bright block crossing the picture, and two scripted dark stretches (a dark
object sweeping through, then a long shadow) placed at the same relative
offsets as frames 550 and 1250-1300 of a 2000-frame clip.
"""
from __future__ import annotations

import numpy as np

from .video.yuv import YuvSequence, write_frames

DARK_EVENTS = ((0.265, 0.295, 0.30), (0.625, 0.655, 0.25))  # (start, end, luma gain) as clip fractions
TEXTURE_AMPLITUDE = 24.0
TEXTURE_PERIOD = 96.0  # pixels
DRIFT = 0.25  # pixels per frame
BLOCK_SPEED = 3  # pixels per frame


def luminance_gain(frame: int, n_frames: int) -> float:
    if n_frames <= 0:
        return 1.0
    pos = frame / n_frames
    for start, end, gain in DARK_EVENTS:
        if start <= pos < end:
            return gain
    return 1.0


class _Painter:
    def __init__(self, width: int, height: int):
        self.width, self.height = width, height
        yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
        self.phase = 2 * np.pi * (xx + 0.5 * yy) / TEXTURE_PERIOD
        self.ramp = 70.0 + 70.0 * yy / max(height - 1, 1)
        cy, cx = np.mgrid[0:height // 2, 0:width // 2].astype(np.float64)
        self.cx, self.cy = cx, cy

    def frame(self, i: int, n_frames: int):
        w, h = self.width, self.height
        shift = 2 * np.pi * DRIFT * i / TEXTURE_PERIOD
        y = self.ramp + TEXTURE_AMPLITUDE * np.sin(self.phase - shift)
        bw, bh = max(w // 8, 2), max(h // 6, 2)
        bx = (BLOCK_SPEED * i) % (w + bw) - bw
        by = h // 2 - bh // 2
        x0, x1 = max(bx, 0), min(bx + bw, w)
        if x1 > x0:
            y[by:by + bh, x0:x1] = 225.0
        y = np.clip(y * luminance_gain(i, n_frames), 0, 255)
        u = 128 + 20 * np.sin(2 * np.pi * (self.cx - i / 2) / 88.0)
        v = 128 + 20 * np.cos(2 * np.pi * (self.cy + i / 3) / 72.0)
        return np.rint(y).astype(np.uint8), np.rint(u).astype(np.uint8), np.rint(v).astype(np.uint8)


def synth_frames(n_frames: int, width: int, height: int):
    painter = _Painter(width, height)
    return (painter.frame(i, n_frames) for i in range(n_frames))


def synth_sequence(n_frames: int, width: int, height: int) -> YuvSequence:
    return YuvSequence.from_frames(synth_frames(n_frames, width, height), width, height)


def write_synth(path, n_frames: int, width: int = 352, height: int = 288) -> None:
    if n_frames < 0:
        raise ValueError("n_frames must be >= 0")
    YuvSequence.empty(width, height)  # dimension check before touching the file
    with open(path, "wb") as fh:
        write_frames(fh, synth_frames(n_frames, width, height))
