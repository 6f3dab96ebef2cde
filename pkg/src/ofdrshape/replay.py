"""Fixed-rate replay of a recorded frame series into a consumer.

A timer-paced producer thread publishes frames into a small bounded queue;
the calling thread drains it into the sink.  When the sink falls behind, the
oldest queued frame is discarded so the sink always sees the freshest data.
"""

from __future__ import annotations

import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ShapeSensingError
from .reconstruction import StrainProfile
from .simulator import FrameSeries

log = logging.getLogger(__name__)

Sink = Callable[[int, float, StrainProfile], None]

DEFAULT_BUFFER = 3


class DropOldestQueue:
    """Bounded FIFO; ``put`` on a full queue evicts the oldest item and counts a drop."""

    def __init__(self, maxsize: int = DEFAULT_BUFFER):
        if maxsize <= 0:
            raise ValueError("maxsize must be > 0")
        self._items: deque = deque(maxlen=maxsize)
        self._cv = threading.Condition()
        self._closed = False
        self.drops = 0

    def put(self, item) -> None:
        with self._cv:
            if len(self._items) == self._items.maxlen:
                self.drops += 1
            self._items.append(item)
            self._cv.notify()

    def close(self) -> None:
        with self._cv:
            self._closed = True
            self._cv.notify_all()

    def get(self):
        """Next item, or ``None`` once the queue is closed and drained."""
        with self._cv:
            while not self._items and not self._closed:
                self._cv.wait()
            return self._items.popleft() if self._items else None

    def __len__(self):
        with self._cv:
            return len(self._items)


@dataclass
class ReplayReport:
    produced: int = 0
    emitted: int = 0
    drops: int = 0
    wall_time: float = 0.0
    jitter_mean: float = 0.0  # s, producer lateness against the ideal schedule
    jitter_max: float = 0.0
    jitter_std: float = 0.0
    delivered: list[int] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d.pop("delivered")
        return d


class ReplayAborted(ShapeSensingError):
    """The sink raised; ``report`` holds what was delivered until then."""

    def __init__(self, message: str, report: ReplayReport):
        super().__init__(message)
        self.report = report


def _sleep_until(deadline: float, stop: threading.Event) -> None:
    # plain sleeps: a busy spin would starve the consumer on a single core
    while not stop.is_set():
        remaining = deadline - time.perf_counter()
        if remaining <= 0:
            return
        time.sleep(remaining)


def replay(frames: FrameSeries, rate: float, sink: Sink, buffer: int = DEFAULT_BUFFER) -> ReplayReport:
    """Deliver ``frames`` to ``sink(frame_idx, depth, profile)`` at ``rate`` Hz.

    Frames are published on an absolute schedule (no drift accumulates).  The
    wall time spans from the first publication to the last delivery.

    Raises:
        ReplayAborted: the sink raised; carries the partial report.
    """
    if not (rate > 0):
        raise DomainError(f"rate must be positive, got {rate}")
    period = 1.0 / rate
    queue = DropOldestQueue(buffer)
    stop = threading.Event()
    report = ReplayReport()
    lateness: list[float] = []
    consumer_ready = threading.Event()
    t0 = time.perf_counter()

    def produce():
        nonlocal t0
        # start the clock only once the consumer is about to block on the
        # queue, so thread start-up latency does not turn into a burst
        consumer_ready.wait()
        t0 = time.perf_counter()
        try:
            for k, (depth, prof) in enumerate(frames):
                _sleep_until(t0 + k * period, stop)
                if stop.is_set():
                    break
                lateness.append(time.perf_counter() - (t0 + k * period))
                queue.put((k, float(depth), prof))
                report.produced += 1
        finally:
            queue.close()

    producer = threading.Thread(target=produce, name="replay-producer", daemon=True)
    producer.start()
    last = None
    try:
        consumer_ready.set()
        while (item := queue.get()) is not None:
            k, depth, prof = item
            sink(k, depth, prof)
            last = time.perf_counter()
            report.delivered.append(k)
    except Exception as exc:
        stop.set()
        report.error = f"{type(exc).__name__}: {exc}"
        log.error("sink failed on frame %d: %s", k, exc)
    finally:
        producer.join()
        report.emitted = len(report.delivered)
        report.drops = queue.drops
        report.wall_time = 0.0 if last is None else last - t0
        if lateness:
            arr = np.asarray(lateness)
            report.jitter_mean = float(arr.mean())
            report.jitter_max = float(arr.max())
            report.jitter_std = float(arr.std())
    if report.error is not None:
        raise ReplayAborted(report.error, report)
    return report
