import time

from pyadiabaton.timing import (
    RunMetric, StepStats, TDigestStat, activated_metric, get_active, set_active, span,
)


def test_span_without_active_metric():
    set_active(None)
    with span("atoms"):
        pass
    assert get_active() is None


def test_activated_metric_restores_previous():
    outer = RunMetric()
    inner = RunMetric()
    with activated_metric(outer):
        with activated_metric(inner) as m:
            assert m is inner
            assert get_active() is inner
        assert get_active() is outer
    assert get_active() is None


def test_nested_spans():
    metric = RunMetric()
    with activated_metric(metric):
        with span("atoms"):
            time.sleep(0.01)
            with span("field_rhs"):
                time.sleep(0.01)
    metric.end()

    assert set(metric.groups) == {"atoms", "field_rhs"}
    # The outer span pauses while the inner one runs.
    assert metric.groups["atoms"] >= 10
    assert metric.groups["field_rhs"] >= 10
    assert metric.groups["atoms"] + metric.groups["field_rhs"] <= metric.total_ms + 1e-6


def test_reentered_span_counts_once():
    metric = RunMetric()
    metric.start_span("atoms")
    metric.start_span("atoms")
    metric.end_span("atoms")
    assert metric.groups == {}
    metric.end_span("atoms")
    assert list(metric.groups) == ["atoms"]


def test_repeated_span_accumulates():
    metric = RunMetric()
    for _ in range(3):
        metric.start_span("atoms")
        metric.end_span("atoms")
    assert list(metric.groups) == ["atoms"]


def test_end_unknown_span(caplog):
    metric = RunMetric()
    metric.end_span("atoms")
    assert "span=atoms does not exist" in caplog.text


def test_end_is_idempotent():
    metric = RunMetric()
    metric.end()
    end_time = metric.end_time
    metric.end()
    assert metric.end_time == end_time
    assert metric.total_ms == (end_time - metric.start_time) * 1000


def test_tdigest_stat():
    stat = TDigestStat()
    assert stat.as_dict() == dict(count=0, sum=0, sumsq=0, p50=None, p90=None, p99=None)

    for ms in (1.0, 2.0, 3.0):
        stat.add(ms)
    d = stat.as_dict()
    assert d["count"] == 3
    assert d["sum"] == 6.0
    assert d["sumsq"] == 14.0
    assert 1.0 <= d["p50"] <= 3.0


def test_step_stats():
    stats = StepStats()
    stats.add_groups(10.0, {"atoms": 7.0, "field_rhs": 2.0})
    stats.add_groups(12.0, {"atoms": 8.0})

    d = stats.as_dict()
    assert d["count"] == 2
    assert d["sum"] == 22.0
    assert d["groups"]["atoms"]["count"] == 2
    assert d["groups"]["atoms"]["sum"] == 15.0
    assert d["groups"]["field_rhs"]["count"] == 1


def test_step_stats_add_metric():
    metric = RunMetric()
    metric.start_span("atoms")
    metric.end_span("atoms")

    stats = StepStats()
    stats.add_metric(metric)
    assert metric.end_time is not None
    assert stats.count == 1
    assert stats.sum == metric.total_ms
    assert list(stats.groups) == ["atoms"]
