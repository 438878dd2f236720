import pytest
from hypothesis import given, strategies as st

from vidmanet.engine import Engine, derive_seed
from vidmanet.errors import SchedulingInPast
from vidmanet.scenario import ScenarioConfig, build_network


def recorder(eng):
    fired = []
    eng.register("x", lambda ev: fired.append((eng.now, ev.seq, ev.data)))
    return fired


def test_schedule_at_now_fires_first():
    eng = Engine()
    fired = recorder(eng)
    eng.schedule(0.5, 0, "x", "later")
    eng.schedule(0.0, 0, "x", "now")
    eng.run_until(1.0)
    assert [d for _, _, d in fired] == ["now", "later"]


def test_equal_times_run_in_schedule_order():
    eng = Engine()
    fired = recorder(eng)
    for tag in "abc":
        eng.schedule(1.0, 0, "x", tag)
    eng.run_until(1.0)
    assert [d for _, _, d in fired] == ["a", "b", "c"]


def test_scheduling_in_the_past_is_rejected():
    eng = Engine()
    eng.run_until(2.0)
    with pytest.raises(SchedulingInPast):
        eng.schedule(1.0, 0, "x")
    with pytest.raises(SchedulingInPast):
        eng.run_until(1.0)


def test_run_until_counts_and_advances_clock():
    eng = Engine()
    recorder(eng)
    assert eng.run_until(10.0) == 0 and eng.now == 10.0
    eng = Engine()
    recorder(eng)
    for t in (1.0, 2.0, 3.0):
        eng.schedule(t, 0, "x")
    assert eng.run_until(2.5) == 2
    assert eng.pending_count() == 1


def test_child_at_same_time_runs_after_parent():
    eng = Engine()
    order = []

    def parent(ev):
        order.append("parent")
        eng.schedule(eng.now, 0, "child")

    eng.register("parent", parent)
    eng.register("child", lambda ev: order.append(("child", eng.now)))
    eng.schedule(1.0, 0, "parent")
    assert eng.run_until(1.0) == 2
    assert order == ["parent", ("child", 1.0)]


def test_cancel_semantics():
    eng = Engine()
    fired = recorder(eng)
    ev = eng.schedule(1.0, 0, "x")
    assert eng.cancel(ev) is True
    assert eng.cancel(ev) is False
    done = eng.schedule(1.5, 0, "x")
    eng.run_until(2.0)
    assert len(fired) == 1
    assert eng.cancel(done) is False
    assert eng.cancel(None) is False


def test_rng_streams_are_independent():
    a = Engine(seed=7)
    b = Engine(seed=7)
    b.rng("other").random()  # extra draws elsewhere must not shift "mac"
    assert [a.rng("mac").random() for _ in range(5)] == [b.rng("mac").random() for _ in range(5)]
    assert Engine(seed=8).rng("mac").random() != Engine(seed=7).rng("mac").random()


def test_derive_seed_is_stable():
    # sha256("1:AODV:4") truncated to 64 bits, computed once by hand
    import hashlib
    want = int.from_bytes(hashlib.sha256(b"1:AODV:4").digest()[:8], "big")
    assert derive_seed(1, "AODV", 4) == want


def test_event_log_is_reproducible():
    def run():
        sim = build_network(ScenarioConfig(protocol="DSDV", n_nodes=9, spacing=100.0, seed=3),
                            record_events=True)
        sim.engine.run_until(20.0)
        return sim.engine.log

    first = run()
    assert len(first) > 50
    assert first == run()
    time, seq, target, kind = first[0].split()
    assert float(time) >= 0 and kind == "dsdv.periodic"


@given(st.lists(st.tuples(st.floats(0, 100, allow_nan=False), st.booleans()), min_size=1, max_size=60))
def test_execution_order_and_cancellation(plan):
    eng = Engine()
    fired = recorder(eng)
    cancelled = set()
    for i, (t, cancel) in enumerate(plan):
        ev = eng.schedule(t, 0, "x", i)
        if cancel:
            eng.cancel(ev)
            cancelled.add(i)
    eng.run_until(100.0)
    ran = [d for _, _, d in fired]
    assert not cancelled & set(ran)
    times = [t for t, _, _ in fired]
    assert times == sorted(times)
    expected = sorted((t, i) for i, (t, c) in enumerate(plan) if not c)
    assert ran == [i for _, i in expected]
