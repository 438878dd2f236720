"""Evalvid-style video pipeline: raw YUV, traces, reconstruction and metrics."""
from .logs import LogRecord, ReceiverLog, SegmentLog, SenderLog
from .metrics import (MetricSeries, PsnrCache, PsnrConfig, delay_and_loss, evaluate,
                      extractability, jitter_series, moving_average, psnr_frame, psnr_series)
from .reconstruct import Concealment, FrameStatus, ReconstructedVideo, reconstruct
from .trace import SizeModel, TraceEntry, VideoTrace, generate_trace
from .yuv import YuvSequence, frame_bytes, load_yuv, store_yuv

__all__ = [
    "Concealment", "FrameStatus", "LogRecord", "MetricSeries", "PsnrCache", "PsnrConfig",
    "ReceiverLog", "ReconstructedVideo", "SegmentLog", "SenderLog", "SizeModel", "TraceEntry",
    "VideoTrace", "YuvSequence", "delay_and_loss", "evaluate", "extractability", "frame_bytes",
    "generate_trace", "jitter_series", "load_yuv", "moving_average", "psnr_frame", "psnr_series",
    "reconstruct", "store_yuv",
]
