import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vidmanet.errors import BadDimensions, DimensionMismatch, InconsistentLogs, TruncatedFile, VideoError
from vidmanet.video import (Concealment, FrameStatus, PsnrCache, PsnrConfig, SegmentLog,
                            SizeModel, TraceEntry, VideoTrace, YuvSequence, delay_and_loss,
                            evaluate, extractability, frame_bytes, generate_trace,
                            jitter_series, load_yuv, moving_average, psnr_frame, reconstruct,
                            store_yuv)
from vidmanet.video.metrics import psnr_series
from conftest import random_sequence


def black(n, w=16, h=16):
    return YuvSequence(w, h, np.zeros((n, h, w), np.uint8),
                       np.full((n, h // 2, w // 2), 128, np.uint8),
                       np.full((n, h // 2, w // 2), 128, np.uint8))


# -- raw YUV ------------------------------------------------------------------

def test_cif_clip_loads(clip_path, clip):
    assert frame_bytes(352, 288) == 152064
    assert len(clip) == 2000
    assert clip_path.stat().st_size == 2000 * 152064


def test_empty_and_truncated_files(tmp_path):
    empty = tmp_path / "empty.yuv"
    empty.write_bytes(b"")
    assert len(load_yuv(empty, 16, 16)) == 0
    bad = tmp_path / "bad.yuv"
    bad.write_bytes(b"\0" * (frame_bytes(16, 16) * 3 // 2))
    with pytest.raises(TruncatedFile):
        load_yuv(bad, 16, 16)


@pytest.mark.parametrize("w, h", [(15, 16), (16, 0), (-2, 4)])
def test_bad_dimensions(tmp_path, w, h):
    with pytest.raises(BadDimensions):
        load_yuv(tmp_path / "x.yuv", w, h)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.sampled_from([(2, 2), (8, 6), (16, 16)]), st.integers(0, 2**32 - 1))
def test_store_then_load_is_identity(tmp_path_factory, n, dims, seed):
    seq = random_sequence(np.random.default_rng(seed), n, *dims)
    path = tmp_path_factory.mktemp("yuv") / "s.yuv"
    store_yuv(seq, path)
    back = load_yuv(path, *dims)
    for a, b in ((seq.y, back.y), (seq.u, back.u), (seq.v, back.v)):
        assert np.array_equal(a, b)


# -- traces ------------------------------------------------------------------

def test_black_frames_cost_base_sizes():
    tr = generate_trace(black(3))
    assert [e.size for e in tr.entries] == [6000, 1500, 1500]
    assert [e.n_segments for e in tr.entries] == [6, 2, 2]
    assert [e.frame_type for e in tr.entries] == ["I", "P", "P"]
    assert [e.gen_time for e in tr.entries] == [0.0, 1 / 30, 2 / 30]


def test_gop_period():
    tr = generate_trace(black(61))
    assert [e.frame_id for e in tr.entries if e.frame_type == "I"] == [0, 30, 60]


def test_motion_costs_more_than_stillness():
    rng = np.random.default_rng(3)
    base = random_sequence(rng, 1)
    still = YuvSequence.from_frames([base.frame(0)] * 2, 16, 16)
    y0 = base.y[0]
    shifted = YuvSequence.from_frames([base.frame(0), (np.roll(y0, 1, axis=1), base.u[0], base.v[0])], 16, 16)
    # oracle: base_p + beta * mean |Y1 - Y0|, evaluated directly
    diff = np.abs(np.roll(y0, 1, axis=1).astype(int) - y0.astype(int)).mean()
    assert generate_trace(shifted)[1].size == round(1500 + 140 * diff)
    assert generate_trace(shifted)[1].size > generate_trace(still)[1].size == 1500


def test_size_clamp_and_segmentation():
    m = SizeModel()
    assert m.clamp(10) == 200 and m.clamp(10**6) == 30000
    tr = VideoTrace([TraceEntry(0, "I", 2500, 3, 0.0)])
    assert tr.segment_sizes(0) == [1024, 1024, 452]


def test_trace_is_deterministic_and_round_trips():
    seq = random_sequence(np.random.default_rng(5), 40)
    a, b = generate_trace(seq), generate_trace(seq)
    assert a.to_text() == b.to_text()
    back = VideoTrace.from_text(a.to_text())
    assert back.to_text() == a.to_text()
    assert [e.size for e in back.entries] == [e.size for e in a.entries]
    line = a.to_text().splitlines()[1].split()
    assert len(line) == 5 and line[1] == "P" and line[4] == f"{1 / 30:.6f}"
    with pytest.raises(VideoError):
        VideoTrace.from_text("0 X 10 1 0.0\n")
    with pytest.raises(VideoError):
        generate_trace(black(0))


# -- logs and reconstruction ------------------------------------------------------

def full_logs(trace, delay=0.01):
    sent, recv = SegmentLog(), SegmentLog()
    uid = 0
    for e in trace.entries:
        for s in range(e.n_segments):
            sent.append(e.gen_time, uid, e.frame_id, s)
            recv.append(e.gen_time + delay, uid, e.frame_id, s)
            uid += 1
    return sent, recv


def test_log_text_round_trip():
    tr = generate_trace(black(4))
    sent, _ = full_logs(tr)
    back = SegmentLog.from_text(sent.to_text())
    assert back.to_text() == sent.to_text()
    assert [r[1:] for r in back] == [r[1:] for r in sent]
    assert sent.to_text().splitlines()[0] == "0.000000000 0 0 0"


def test_complete_log_reproduces_source():
    seq = random_sequence(np.random.default_rng(1), 12)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    rec = reconstruct(tr, sent, recv, seq)
    assert rec.decodable_count == 12
    assert np.array_equal(rec.to_sequence().y, seq.y)
    assert np.all(psnr_series(rec) == 100.0)


def test_lost_i_frame_conceals_whole_gop():
    seq = random_sequence(np.random.default_rng(2), 35)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    rec = reconstruct(tr, sent, recv.without(0, 0), seq)
    assert rec.status[0] is FrameStatus.LOST
    assert all(s is FrameStatus.DELIVERED_UNDECODABLE for s in rec.status[1:30])
    assert all(s is FrameStatus.DELIVERED_DECODABLE for s in rec.status[30:])
    assert list(rec.shown[:30]) == [-1] * 30  # black until the next I frame


def test_lost_p_segment_conceals_rest_of_gop():
    seq = random_sequence(np.random.default_rng(4), 10)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    rec = reconstruct(tr, sent, recv.without(5, 0), seq)
    assert list(rec.decodable) == [True] * 5 + [False] * 5
    assert list(rec.shown) == [0, 1, 2, 3, 4, 4, 4, 4, 4, 4]
    zero = reconstruct(tr, sent, recv.without(5, 0), seq, Concealment.ZERO_FILL)
    assert np.all(zero.luma(7) == 0)


def test_inconsistent_logs():
    seq = random_sequence(np.random.default_rng(6), 3)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    recv.append(1.0, 99, 7, 0)
    with pytest.raises(InconsistentLogs):
        reconstruct(tr, sent, recv, seq)
    sent2, recv2 = full_logs(tr)
    with pytest.raises(InconsistentLogs):
        reconstruct(tr, sent2.without(1, 0), recv2, seq)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 0.6))
def test_removing_a_segment_never_adds_decodable_frames(seed, loss):
    seq = random_sequence(np.random.default_rng(seed), 40)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    rng = np.random.default_rng(seed + 1)
    kept = SegmentLog([r for r in recv if rng.random() >= loss])
    if not len(kept):
        return
    base = reconstruct(tr, sent, kept, seq).decodable_count
    r = kept.records[int(rng.integers(len(kept)))]
    assert reconstruct(tr, sent, kept.without(r.frame_id, r.segment_index), seq).decodable_count <= base


# -- PSNR -------------------------------------------------------------------------

def brute_psnr(a, b, peak=255, cap=100.0):
    h, w = a.shape
    total = 0
    for i in range(h):
        for j in range(w):
            d = int(a[i, j]) - int(b[i, j])
            total += d * d
    if total == 0:
        return cap
    return 20 * math.log10(peak / math.sqrt(total / (h * w)))


def test_psnr_analytic_cases():
    z = np.zeros((4, 4), np.uint8)
    assert psnr_frame(z, z) == 100.0
    assert psnr_frame(z, np.full((4, 4), 255, np.uint8)) == 0.0
    a = np.zeros((2, 2), np.uint8)
    b = a.copy()
    b[0, 0] = 255
    assert psnr_frame(a, b) == pytest.approx(20 * math.log10(2), abs=1e-12)
    with pytest.raises(DimensionMismatch):
        psnr_frame(a, z)


def test_psnr_config():
    assert PsnrConfig(bits=10).v_peak == 1023
    with pytest.raises(ValueError):
        PsnrConfig(cap_db=40.0)


frames = st.tuples(st.integers(1, 24), st.integers(1, 24), st.integers(0, 2**32 - 1))


@settings(max_examples=80, deadline=None)
@given(frames)
def test_psnr_brute_force_symmetry_and_permutation(case):
    h, w, seed = case
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 256, (h, w), dtype=np.uint8)
    b = rng.integers(0, 256, (h, w), dtype=np.uint8)
    p = psnr_frame(a, b)
    assert abs(p - brute_psnr(a, b)) < 1e-9
    assert p == psnr_frame(b, a) and p >= 0
    perm = rng.permutation(h * w)
    assert p == psnr_frame(a.ravel()[perm], b.ravel()[perm])


def test_psnr_cache_matches_direct():
    seq = random_sequence(np.random.default_rng(9), 4)
    cache = PsnrCache(seq)
    assert cache(1, 1) == 100.0
    assert cache(0, 2) == psnr_frame(seq.y[0], seq.y[2])
    assert cache(3, -1) == psnr_frame(seq.y[3], np.zeros_like(seq.y[3]))


# -- timing metrics ---------------------------------------------------------------

def seglog(times):
    log = SegmentLog()
    for f, t in enumerate(times):
        log.append(t, f, f, 0)
    return log


def hand_jitter(s, r):
    return [(r[i] - r[i - 1]) - (s[i] - s[i - 1]) for i in range(1, len(s))]


def test_jitter_worked_example():
    s = [0, 1 / 30, 2 / 30]
    r = [0.5, 0.5 + 1 / 30, 0.5 + 3 / 30]
    got = jitter_series(seglog(s), seglog(r))
    assert got == hand_jitter(s, r)  # same arithmetic, bit for bit
    # and against exact rationals: [0, 1/30] up to float rounding of the inputs
    want = [Fraction(0), Fraction(1, 30)]
    assert all(abs(Fraction(g) - w) < Fraction(1, 10**15) for g, w in zip(got, want))
    assert jitter_series(seglog(s), seglog(r), cumulative=True)[-1] == pytest.approx(1 / 30, abs=1e-15)


def test_jitter_edges():
    s = seglog([0.0, 0.1, 0.2, 0.3])
    assert jitter_series(s, seglog([0.05, 0.15, 0.25, 0.35])) == pytest.approx([0, 0, 0])
    assert jitter_series(s, seglog([1.0])) == []
    # receive time is the last segment, send time the first
    s2, r2 = SegmentLog(), SegmentLog()
    for f, (t0, t1) in enumerate([(0.0, 0.0), (0.1, 0.1)]):
        s2.append(t0, 2 * f, f, 0)
        s2.append(t1, 2 * f + 1, f, 1)
    r2.append(0.01, 0, 0, 0)
    r2.append(0.02, 1, 0, 1)
    r2.append(0.11, 2, 1, 0)
    r2.append(0.15, 3, 1, 1)
    assert jitter_series(s2, r2) == [pytest.approx((0.15 - 0.02) - 0.1)]
    # cumulative mode is the running sum
    r3 = seglog([0.1, 0.25, 0.3, 0.5])
    plain = jitter_series(s, r3)
    assert jitter_series(s, r3, cumulative=True) == pytest.approx(list(np.cumsum(plain)))


def test_delay_and_loss():
    tr = generate_trace(black(4))
    sent, recv = full_logs(tr, delay=0.010)
    delays, loss = delay_and_loss(tr, sent, recv)
    assert loss == 0 and all(d == pytest.approx(0.010) for d in delays.values())
    assert delay_and_loss(tr, sent, SegmentLog()) == ({}, 1.0)
    partial = SegmentLog([r for r in recv if r.frame_id != 2])
    assert delay_and_loss(tr, sent, partial)[1] == 0.25


def test_moving_average_examples():
    assert list(moving_average([0, 100], 2)) == [0, 50]
    assert list(moving_average([3, 1, 4], 1)) == [3, 1, 4]
    assert list(moving_average([7.0] * 5, 3)) == [7.0] * 5
    assert moving_average([], 5).size == 0
    with pytest.raises(ValueError):
        moving_average([1], 0)


@given(st.lists(st.floats(-1e6, 1e6), max_size=50), st.integers(1, 60))
def test_moving_average_is_a_trailing_mean(xs, w):
    out = moving_average(xs, w)
    assert len(out) == len(xs)
    for i in range(len(xs)):
        window = xs[max(0, i - w + 1):i + 1]
        assert out[i] == pytest.approx(sum(window) / len(window), rel=1e-9, abs=1e-6)


def test_extractability_threshold():
    seq = random_sequence(np.random.default_rng(8), 20)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    everything = reconstruct(tr, sent, recv, seq)
    assert extractability(everything, 0.05)
    nothing = reconstruct(tr, sent, SegmentLog(), seq)
    assert not extractability(nothing, 0.05)
    one = reconstruct(tr, sent, SegmentLog([r for r in recv if r.frame_id == 0]), seq)
    assert one.decodable_ratio == 0.05 and extractability(one, 0.05)
    with pytest.raises(ValueError):
        extractability(one, 0)


def test_metric_series_csv():
    seq = random_sequence(np.random.default_rng(11), 6)
    tr = generate_trace(seq)
    sent, recv = full_logs(tr)
    recv = SegmentLog([r for r in recv if r.frame_id != 3])
    rec = reconstruct(tr, sent, recv, seq)
    m = evaluate(tr, sent, recv, rec)
    lines = m.to_csv().splitlines()
    assert lines[0] == "frame,delivered,decodable,psnr_db,delay_s,jitter_s"
    assert len(lines) == 7
    row3 = lines[4].split(",")
    assert row3[:3] == ["3", "0", "0"] and row3[4:] == ["", ""]
    assert lines[1].split(",")[5] == ""  # frame 0 has no predecessor
    assert m.loss_rate == pytest.approx(1 / 6)
