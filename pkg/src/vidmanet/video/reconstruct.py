"""Rebuild the video the receiver would play out, with loss concealment."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import InconsistentLogs
from .logs import SegmentLog
from .trace import I_FRAME, VideoTrace
from .yuv import YuvSequence, write_frames


class FrameStatus(enum.Enum):
    DELIVERED_DECODABLE = "decodable"
    DELIVERED_UNDECODABLE = "undecodable"
    LOST = "lost"


class Concealment(enum.Enum):
    REPEAT_LAST = "repeat_last"
    ZERO_FILL = "zero_fill"


BLACK = -1
ZERO = -2


@dataclass
class ReconstructedVideo:
    """Output frame ``i`` is ``source`` frame ``shown[i]``, or a black/zero frame.

    Decodable frames are the source frames themselves (no coding loss), so the
    output is kept as an index map and materialised on demand.
    """

    source: YuvSequence
    status: list[FrameStatus]
    shown: np.ndarray
    mode: Concealment

    def __len__(self) -> int:
        return len(self.status)

    @property
    def delivered(self) -> np.ndarray:
        return np.array([s is not FrameStatus.LOST for s in self.status], dtype=bool)

    @property
    def decodable(self) -> np.ndarray:
        return np.array([s is FrameStatus.DELIVERED_DECODABLE for s in self.status], dtype=bool)

    @property
    def decodable_count(self) -> int:
        return int(self.decodable.sum())

    @property
    def decodable_ratio(self) -> float:
        return self.decodable_count / len(self.status) if self.status else 0.0

    def frame(self, i: int):
        j = int(self.shown[i])
        if j == BLACK:
            return self.source.black_frame()
        if j == ZERO:
            return self.source.zero_frame()
        return self.source.frame(j)

    def luma(self, i: int) -> np.ndarray:
        return self.frame(i)[0]

    def to_sequence(self) -> YuvSequence:
        return YuvSequence.from_frames((self.frame(i) for i in range(len(self))),
                                       self.source.width, self.source.height, self.source.bits)

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            write_frames(fh, (self.frame(i) for i in range(len(self))), self.source.bits)


def frame_status(trace: VideoTrace, sender_log: SegmentLog, receiver_log: SegmentLog) -> list[FrameStatus]:
    n = len(trace)
    sent = set()
    for r in sender_log:
        if not 0 <= r.frame_id < n or not 0 <= r.segment_index < trace[r.frame_id].n_segments:
            raise InconsistentLogs(f"sender log names unknown segment {r.frame_id}/{r.segment_index}")
        sent.add((r.frame_id, r.segment_index))
    got = [0] * n
    seen = set()
    for r in receiver_log:
        key = (r.frame_id, r.segment_index)
        if not 0 <= r.frame_id < n or not 0 <= r.segment_index < trace[r.frame_id].n_segments:
            raise InconsistentLogs(f"receiver log names unknown segment {key}")
        if key not in sent:
            raise InconsistentLogs(f"segment {key} received but never sent")
        if key not in seen:
            seen.add(key)
            got[r.frame_id] += 1
    status = []
    prev_ok = False
    for i, e in enumerate(trace.entries):
        if got[i] < e.n_segments:
            status.append(FrameStatus.LOST)
            prev_ok = False
            continue
        ok = e.frame_type == I_FRAME or prev_ok
        status.append(FrameStatus.DELIVERED_DECODABLE if ok else FrameStatus.DELIVERED_UNDECODABLE)
        prev_ok = ok
    return status


def reconstruct(trace: VideoTrace, sender_log: SegmentLog, receiver_log: SegmentLog,
                source: YuvSequence, mode: Concealment = Concealment.REPEAT_LAST) -> ReconstructedVideo:
    if len(source) < len(trace):
        raise InconsistentLogs(f"source has {len(source)} frames, trace has {len(trace)}")
    mode = Concealment(mode)
    status = frame_status(trace, sender_log, receiver_log)
    shown = np.empty(len(status), dtype=np.int64)
    last = BLACK
    for i, s in enumerate(status):
        if s is FrameStatus.DELIVERED_DECODABLE:
            shown[i] = last = i
        elif mode is Concealment.REPEAT_LAST:
            shown[i] = last
        else:
            shown[i] = ZERO
    return ReconstructedVideo(source.head(len(trace)), status, shown, mode)
