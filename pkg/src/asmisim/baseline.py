"""Synchronous AMI polling baseline.

Reads every sensor on a fixed interval regardless of whether anything
changed, which is exactly the cost structure the event-driven pipeline is
measured against. Polling is lossless and instantaneous here — a generous
baseline — so any error is purely the staleness of the zero-order hold
between polls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .signalgen import Signal, value_at
from .simkernel import SimTime

# Same on-air cost per message as the event pipeline's fixed frame.
AMI_FRAME_BYTES = 14


class NonPositiveInterval(Exception):
    """Polling or grid interval must be a positive number of ms."""


class ZeroBudget(Exception):
    """A matched message budget of zero cannot define an interval."""


@dataclass(frozen=True)
class AmiSample:
    t: SimTime
    value: float


@dataclass(frozen=True)
class ErrorReport:
    sup: float
    mean: float
    rmse: float
    n_points: int


def poll(signal: Signal, dt: SimTime, horizon: SimTime) -> list[AmiSample]:
    """Sample the signal at dt, 2*dt, ... up to and including the horizon."""
    if dt <= 0:
        raise NonPositiveInterval(f"dt must be positive, got {dt}")
    samples = []
    k = 1
    while k * dt <= horizon:
        t = k * dt
        samples.append(AmiSample(t=t, value=value_at(signal, t)))
        k += 1
    return samples


def reconstruct_ami(samples: list[AmiSample], t: SimTime, p0: float = 0.0) -> float:
    """Zero-order hold: latest sample at or before t, else the prior p0."""
    best = None
    for s in samples:
        if s.t <= t and (best is None or s.t > best.t):
            best = s
    return best.value if best is not None else p0


def error_stats(
    truth: Signal,
    samples: list[AmiSample],
    horizon: SimTime,
    grid: SimTime = 60_000,
    p0: float = 0.0,
) -> ErrorReport:
    """Sup/mean/RMS absolute error of the hold against truth on a uniform grid."""
    if grid <= 0:
        raise NonPositiveInterval(f"grid must be positive, got {grid}")
    # Sorting once turns reconstruct into a scan instead of O(n) per point.
    ordered = sorted(samples, key=lambda s: s.t)
    sup = 0.0
    total = 0.0
    total_sq = 0.0
    n = 0
    idx = -1
    t = 0
    while t <= horizon:
        while idx + 1 < len(ordered) and ordered[idx + 1].t <= t:
            idx += 1
        held = ordered[idx].value if idx >= 0 else p0
        err = abs(value_at(truth, t) - held)
        sup = max(sup, err)
        total += err
        total_sq += err * err
        n += 1
        t += grid
    return ErrorReport(sup=sup, mean=total / n, rmse=math.sqrt(total_sq / n), n_points=n)


def matched_budget_interval(horizon: SimTime, n_messages: int) -> SimTime:
    """Largest dt whose poll count over the horizon is at least n_messages.

    floor(horizon / n) polls at least n times whenever n <= horizon, so the
    baseline never gets fewer messages than the pipeline it is matched to.
    """
    if n_messages <= 0:
        raise ZeroBudget(f"need a positive message budget, got {n_messages}")
    if horizon <= 0:
        raise NonPositiveInterval(f"horizon must be positive, got {horizon}")
    dt = horizon // n_messages
    return max(1, dt)
