"""Per-segment send/receive logs (the sd/rd timestamp files)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ..errors import VideoError


class LogRecord(NamedTuple):
    time: float
    packet_uid: int
    frame_id: int
    segment_index: int


@dataclass
class SegmentLog:
    records: list[LogRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, time: float, packet_uid: int, frame_id: int, segment_index: int) -> None:
        self.records.append(LogRecord(time, packet_uid, frame_id, segment_index))

    def keys(self) -> set[tuple[int, int]]:
        return {(r.frame_id, r.segment_index) for r in self.records}

    def frame_times(self, last: bool = True) -> dict[int, float]:
        """Per-frame time of the last (or first) logged segment."""
        out: dict[int, float] = {}
        pick = max if last else min
        for r in self.records:
            t = out.get(r.frame_id)
            out[r.frame_id] = r.time if t is None else pick(t, r.time)
        return out

    def without(self, frame_id: int, segment_index: int) -> "SegmentLog":
        return SegmentLog([r for r in self.records
                           if (r.frame_id, r.segment_index) != (frame_id, segment_index)])

    def to_text(self) -> str:
        return "".join(f"{r.time:.9f} {r.packet_uid} {r.frame_id} {r.segment_index}\n"
                       for r in self.records)

    @classmethod
    def from_text(cls, text: str) -> "SegmentLog":
        log = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise VideoError(f"log line {lineno}: {line!r}")
            log.append(float(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]))
        return log


SenderLog = ReceiverLog = SegmentLog
