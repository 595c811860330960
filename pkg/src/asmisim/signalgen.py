"""Ground-truth generators for controlled parameters P(t).

Two families cover the monitored parameter classes:

* CUMULATIVE — non-decreasing resource counters (kWh, m3, ...) built from a
  base consumption rate plus step-load intervals.
* AMBIENT — bidirectional environmental parameters (degC, hPa, ug/m3, ...):
  a diurnal sinusoid plus a seeded random walk that is piecewise-constant
  between noise ticks, so exact crossing instants are well defined.

Evaluation is pure: a Signal with a fixed seed always yields the same value
at the same time, regardless of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .rng import derive_rng
from .simkernel import SimTime

MS_PER_HOUR = 3_600_000
DAY_MS = 86_400_000


class SignalError(Exception):
    pass


class OutOfHorizon(SignalError):
    """Evaluation time outside the signal's declared horizon."""


class NonPositiveDelta(SignalError):
    """Crossing detection requires a strictly positive delta."""


class SignalKind(str, Enum):
    CUMULATIVE = "CUMULATIVE"
    AMBIENT = "AMBIENT"


@dataclass(frozen=True)
class LoadInterval:
    start: SimTime
    end: SimTime
    rate_per_hour: float


@dataclass(frozen=True)
class StepLoadSpec:
    """Piecewise-constant consumption rate: base plus overlapping intervals."""

    base_rate_per_hour: float = 0.0
    intervals: tuple[LoadInterval, ...] = ()


@dataclass(frozen=True)
class DiurnalSpec:
    """mean + amplitude*sin(2*pi*(t - phase)/period) + random-walk noise."""

    mean: float
    amplitude: float
    period: SimTime = DAY_MS
    phase: SimTime = 0
    noise_sigma: float = 0.0
    noise_step: SimTime = 60_000


@dataclass
class Signal:
    kind: SignalKind
    spec: StepLoadSpec | DiurnalSpec
    unit: str = ""
    seed: int = 0
    horizon: SimTime | None = None
    _walk: list[float] = field(default_factory=lambda: [0.0], repr=False)
    _walk_rng: object = field(default=None, repr=False)

    def _noise_at(self, t: SimTime) -> float:
        spec = self.spec
        if spec.noise_sigma == 0.0:
            return 0.0
        idx = t // spec.noise_step
        if idx >= len(self._walk):
            if self._walk_rng is None:
                self._walk_rng = derive_rng(self.seed, "walk")
            while len(self._walk) <= idx:
                step = self._walk_rng.gauss(0.0, spec.noise_sigma)
                self._walk.append(self._walk[-1] + step)
        return self._walk[idx]


def step_load_signal(
    base_rate_per_hour: float = 0.0,
    intervals: tuple[tuple[SimTime, SimTime, float], ...] | list = (),
    unit: str = "kWh",
    horizon: SimTime | None = None,
) -> Signal:
    spec = StepLoadSpec(
        base_rate_per_hour=base_rate_per_hour,
        intervals=tuple(LoadInterval(s, e, r) for s, e, r in intervals),
    )
    return Signal(kind=SignalKind.CUMULATIVE, spec=spec, unit=unit, horizon=horizon)


def diurnal_signal(
    mean: float,
    amplitude: float,
    period: SimTime = DAY_MS,
    phase: SimTime = 0,
    noise_sigma: float = 0.0,
    noise_step: SimTime = 60_000,
    unit: str = "degC",
    seed: int = 0,
    horizon: SimTime | None = None,
) -> Signal:
    spec = DiurnalSpec(mean, amplitude, period, phase, noise_sigma, noise_step)
    return Signal(kind=SignalKind.AMBIENT, spec=spec, unit=unit, seed=seed, horizon=horizon)


def value_at(signal: Signal, t: SimTime) -> float:
    """Evaluate the ground-truth parameter at integer millisecond t."""
    if t < 0 or (signal.horizon is not None and t > signal.horizon):
        raise OutOfHorizon(f"t={t} outside [0, {signal.horizon}]")
    spec = signal.spec
    if signal.kind is SignalKind.CUMULATIVE:
        total = spec.base_rate_per_hour * t / MS_PER_HOUR
        for iv in spec.intervals:
            overlap = min(t, iv.end) - iv.start
            if overlap > 0:
                total += iv.rate_per_hour * overlap / MS_PER_HOUR
        return total
    # Fold into [0, period) before multiplying by 2*pi so values at whole
    # periods are exact (sin(2*pi*k) would not be).
    frac = ((t - spec.phase) % spec.period) / spec.period
    return spec.mean + spec.amplitude * math.sin(2.0 * math.pi * frac) + signal._noise_at(t)


def _breakpoints(signal: Signal, horizon: SimTime) -> list[SimTime]:
    """Integer times splitting [0, horizon] into monotone, continuous pieces.

    Between consecutive breakpoints the signal restricted to the millisecond
    lattice is monotone and jump-free; jumps (noise ticks) and sinusoid
    extrema always land on a breakpoint or inside a 1 ms gap between two.
    """
    pts = {0, horizon}
    spec = signal.spec
    if signal.kind is SignalKind.CUMULATIVE:
        for iv in spec.intervals:
            for edge in (iv.start, iv.end):
                if 0 < edge < horizon:
                    pts.add(edge)
        return sorted(pts)
    # Sinusoid extrema at phase + (1/4 + n/2) * period.
    quarter = spec.period / 4.0
    n0 = math.floor((0 - spec.phase - quarter) / (spec.period / 2.0)) - 1
    ext = spec.phase + quarter + n0 * (spec.period / 2.0)
    while ext <= horizon + spec.period / 2.0:
        if 0 < ext < horizon:
            pts.add(math.floor(ext))
            pts.add(math.ceil(ext))
        ext += spec.period / 2.0
    if spec.noise_sigma != 0.0:
        tick = spec.noise_step
        while tick < horizon:
            pts.add(tick)
            tick += spec.noise_step
    return sorted(p for p in pts if 0 <= p <= horizon)


def reach_tolerance(threshold: float, dp: float) -> float:
    """Slack for grid-crossing comparisons, scaled to the quantum.

    Thresholds are reconstructed as p0 + k*dp, so a signal that lands
    exactly on a grid line in exact arithmetic can sit one ulp short of
    the float threshold (50 * 0.1 > 5.0). Comparing against
    threshold -/+ this slack makes representable boundary hits count as
    crossings while staying nine orders of magnitude below the quantum.
    """
    return 1e-9 * max(abs(threshold), dp)


def crossing_times(
    signal: Signal,
    p0: float,
    dp: float,
    horizon: SimTime,
) -> list[tuple[SimTime, int]]:
    """Exact instants a perfect delta sensor would emit, with directions.

    Returns every millisecond t at which the signal crosses the running
    reference grid p0 + k*dp, as (t, +1) or (t, -1), ordered by time. The
    reference moves one quantum per crossing; a jump across several quanta
    yields several entries at the same t. Crossings are found by bisection
    within monotone segments, so each reported t is the first millisecond
    at which the crossing condition holds.
    """
    if dp <= 0:
        raise NonPositiveDelta(f"dp must be positive, got {dp}")
    out: list[tuple[SimTime, int]] = []
    k = 0

    def up_threshold() -> float:
        thr = p0 + (k + 1) * dp
        return thr - reach_tolerance(thr, dp)

    def down_threshold() -> float:
        thr = p0 + (k - 1) * dp
        return thr + reach_tolerance(thr, dp)

    def advance(t: SimTime) -> None:
        nonlocal k
        v = value_at(signal, t)
        while v >= up_threshold():
            k += 1
            out.append((t, +1))
        while v <= down_threshold():
            k -= 1
            out.append((t, -1))

    advance(0)
    pts = _breakpoints(signal, horizon)
    prev = 0
    for b in pts:
        if b <= prev:
            continue
        w = b - 1
        cursor = prev
        while w > cursor:
            vw = value_at(signal, w)
            if vw >= up_threshold():
                t = _first_at_or_above(signal, cursor, w, up_threshold())
            elif vw <= down_threshold():
                t = _first_at_or_below(signal, cursor, w, down_threshold())
            else:
                break
            advance(t)
            cursor = t
        advance(b)
        prev = b
    return out


def _first_at_or_above(signal: Signal, lo: SimTime, hi: SimTime, threshold: float) -> SimTime:
    # value_at(lo) < threshold <= value_at(hi), monotone non-decreasing on [lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if value_at(signal, mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def _first_at_or_below(signal: Signal, lo: SimTime, hi: SimTime, threshold: float) -> SimTime:
    # value_at(lo) > threshold >= value_at(hi), monotone non-increasing on [lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if value_at(signal, mid) <= threshold:
            hi = mid
        else:
            lo = mid
    return hi
