import threading
import time as pytime
from contextlib import contextmanager

import tdigest

from .utils import logger

threadLocal = threading.local()

_METRIC_KEY = "_pa_metric"

_PERCENTILES = (50, 90, 99)


@contextmanager
def activated_metric(metric):
    prev = get_active()
    set_active(metric)
    try:
        yield metric
    finally:
        set_active(prev)


def set_active(metric):
    setattr(threadLocal, _METRIC_KEY, metric)


def get_active():
    return getattr(threadLocal, _METRIC_KEY, None)


@contextmanager
def span(name):
    """Times the enclosed block into the active metric, if any."""
    metric = get_active()
    if metric is None:
        yield
        return
    metric.start_span(name)
    try:
        yield
    finally:
        metric.end_span(name)


class RunMetric:
    """
    Wall-clock breakdown of one depth step. Spans nest: opening a span pauses
    the current one, and re-entering a span with the same name only bumps
    its level.
    """

    def __init__(self):
        self.start_time = pytime.perf_counter()
        self.end_time = None

        self._spans = {}
        self._curr_span = None

        self.groups = {}

    def end(self):
        if self.end_time is None:
            self.end_time = pytime.perf_counter()

    @property
    def total_ms(self):
        end = self.end_time if self.end_time is not None else pytime.perf_counter()
        return (end - self.start_time) * 1000

    def start_span(self, name):
        if self._curr_span is not None:
            if self._curr_span.name == name:
                self._curr_span._level += 1
                return
            self._curr_span._pause()

        span_ = self._spans.get(name)
        if span_ is None:
            span_ = Span(metric=self, name=name)
            self._spans[name] = span_
        else:
            span_._resume()

        span_._parent = self._curr_span
        self._curr_span = span_

    def end_span(self, name):
        if self._curr_span is not None and self._curr_span.name == name:
            if self._end_span(self._curr_span):
                self._curr_span = self._curr_span._parent
                if self._curr_span is not None:
                    self._curr_span._resume()
            return

        span_ = self._spans.get(name)
        if span_ is None:
            logger.error("pyadiabaton: span=%s does not exist", name)
            return
        self._end_span(span_)

    def _end_span(self, span_):
        if span_._level > 0:
            span_._level -= 1
            return False

        span_.end()
        self._spans.pop(span_.name)
        return True

    def _inc_group(self, name, ms):
        self.groups[name] = self.groups.get(name, 0) + ms


class Span:
    def __init__(self, *, metric=None, name=""):
        self._metric = metric
        self._parent = None

        self.name = name
        self.start_time = pytime.perf_counter()

        self._dur = 0
        self._level = 0

    def end(self):
        if not self._paused():
            self._dur += (pytime.perf_counter() - self.start_time) * 1000
        self._metric._inc_group(self.name, self._dur)
        self._metric = None

    def _pause(self):
        if self._paused():
            return
        self._dur += (pytime.perf_counter() - self.start_time) * 1000
        self.start_time = 0

    def _paused(self):
        return self.start_time == 0

    def _resume(self):
        if not self._paused():
            return
        self.start_time = pytime.perf_counter()


class TDigestStat:
    __slots__ = ("count", "sum", "sumsq", "td")

    def __init__(self):
        self.count = 0
        self.sum = 0
        self.sumsq = 0
        self.td = tdigest.TDigest(K=10)

    def add(self, ms):
        self.count += 1
        self.sum += ms
        self.sumsq += ms * ms
        self.td.update(ms)

    def as_dict(self):
        out = dict(count=self.count, sum=self.sum, sumsq=self.sumsq)
        for p in _PERCENTILES:
            out[f"p{p}"] = self.td.percentile(p) if self.count else None
        return out


class StepStats(TDigestStat):
    """Per-step wall time plus a digest per named span."""

    __slots__ = ("groups",)

    def __init__(self):
        super().__init__()
        self.groups = {}

    def add_metric(self, metric):
        metric.end()
        self.add_groups(metric.total_ms, metric.groups)

    def add_groups(self, total_ms, groups):
        self.add(total_ms)

        for name, ms in groups.items():
            self.add_group(name, ms)

    def add_group(self, name, ms):
        stat = self.groups.get(name)
        if stat is None:
            stat = TDigestStat()
            self.groups[name] = stat
        stat.add(ms)

    def as_dict(self):
        out = super().as_dict()
        out["groups"] = {name: stat.as_dict() for name, stat in self.groups.items()}
        return out
