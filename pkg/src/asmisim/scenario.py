"""Scenario configuration: JSON document -> validated Scenario.

Validation is all-at-once: every problem in the document is reported with
its field path in a single pass, so a batch user fixes a config in one
round trip instead of replaying the simulator error by error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .radio import ChannelSpec, CoverageMap
from .sensor import SensorDescriptor, SensorMode
from .signalgen import (
    DAY_MS,
    DiurnalSpec,
    LoadInterval,
    SignalKind,
    StepLoadSpec,
)

DEFAULT_LATENCY = 50
DEFAULT_FLUSH_INTERVAL = 60_000
DEFAULT_SYNC_INTERVAL = 3_600_000
DEFAULT_BACKHAUL_DELAY = 500
DEFAULT_ERROR_GRID = 60_000

MAX_SEED = 2**64 - 1
MAX_SENSOR_ID = 2**32 - 1


class ScenarioValidationError(Exception):
    """Carries every (path, message) pair found in one validation pass."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        lines = "; ".join(f"{path}: {message}" for path, message in errors)
        super().__init__(f"{len(errors)} validation error(s): {lines}")


@dataclass(frozen=True)
class SignalDef:
    signal_id: str
    kind: SignalKind
    unit: str
    spec: StepLoadSpec | DiurnalSpec


@dataclass(frozen=True)
class RouterDef:
    router_id: int
    location: str = ""
    flush_interval: int = DEFAULT_FLUSH_INTERVAL
    drift_ppm: float = 0.0
    sync_residual: int = 0


@dataclass(frozen=True)
class BaselineDef:
    enabled: bool = False
    dt: int | str = "matched"  # positive ms or the literal "matched"


@dataclass
class Scenario:
    scenario_id: str
    seed: int
    horizon: int
    signals: dict[str, SignalDef]
    sensors: list[SensorDescriptor]
    sensor_locations: dict[int, str]
    routers: list[RouterDef]
    coverage: CoverageMap
    channel: ChannelSpec
    sync_interval: int = DEFAULT_SYNC_INTERVAL
    backhaul_delay: int = DEFAULT_BACKHAUL_DELAY
    baseline: BaselineDef = field(default_factory=BaselineDef)
    error_grid: int = DEFAULT_ERROR_GRID
    outputs: str = "out"


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return _is_int(x) or isinstance(x, float)


def validate(doc: dict) -> Scenario:
    """Check a parsed config document; raises ScenarioValidationError."""
    errors: list[tuple[str, str]] = []

    def bad(path: str, message: str) -> None:
        errors.append((path, message))

    if not isinstance(doc, dict):
        raise ScenarioValidationError([("", "config must be a JSON object")])

    scenario_id = doc.get("scenario_id", "scenario")
    if not isinstance(scenario_id, str) or not scenario_id:
        bad("scenario_id", "must be a non-empty string")
        scenario_id = "scenario"

    seed = doc.get("seed", 0)
    if not _is_int(seed) or not (0 <= seed <= MAX_SEED):
        bad("seed", "must be an unsigned 64-bit integer")
        seed = 0

    horizon = doc.get("horizon")
    if not _is_int(horizon) or horizon <= 0:
        bad("horizon", "must be a positive integer (milliseconds)")
        horizon = 1

    # --- signals ---
    signals: dict[str, SignalDef] = {}
    raw_signals = doc.get("signals")
    if not isinstance(raw_signals, list) or not raw_signals:
        bad("signals", "must be a non-empty list")
        raw_signals = []
    for i, raw in enumerate(raw_signals):
        path = f"signals[{i}]"
        if not isinstance(raw, dict):
            bad(path, "must be an object")
            continue
        sid = raw.get("id")
        if not isinstance(sid, str) or not sid:
            bad(f"{path}.id", "must be a non-empty string")
            continue
        if sid in signals:
            bad(f"{path}.id", f"duplicate signal id {sid!r}")
            continue
        unit = raw.get("unit", "")
        if not isinstance(unit, str):
            bad(f"{path}.unit", "must be a string")
            unit = ""
        kind_raw = raw.get("kind")
        if kind_raw == "cumulative":
            base = raw.get("base_rate_per_hour", 0)
            if not _is_num(base) or base < 0:
                bad(f"{path}.base_rate_per_hour", "must be a non-negative number")
                base = 0
            intervals = []
            raw_intervals = raw.get("intervals", [])
            if not isinstance(raw_intervals, list):
                bad(f"{path}.intervals", "must be a list")
                raw_intervals = []
            for j, iv in enumerate(raw_intervals):
                ipath = f"{path}.intervals[{j}]"
                if not isinstance(iv, dict):
                    bad(ipath, "must be an object")
                    continue
                start, end = iv.get("start"), iv.get("end")
                rate = iv.get("rate_per_hour")
                ok = True
                if not _is_int(start) or start < 0:
                    bad(f"{ipath}.start", "must be a non-negative integer")
                    ok = False
                if not _is_int(end) or (ok and end <= start):
                    bad(f"{ipath}.end", "must be an integer greater than start")
                    ok = False
                if not _is_num(rate) or rate < 0:
                    bad(f"{ipath}.rate_per_hour", "must be a non-negative number")
                    ok = False
                if ok:
                    intervals.append(LoadInterval(start, end, float(rate)))
            spec: StepLoadSpec | DiurnalSpec = StepLoadSpec(
                base_rate_per_hour=float(base), intervals=tuple(intervals)
            )
            signals[sid] = SignalDef(sid, SignalKind.CUMULATIVE, unit, spec)
        elif kind_raw == "ambient":
            mean = raw.get("mean", 0.0)
            amplitude = raw.get("amplitude", 0.0)
            period = raw.get("period", DAY_MS)
            phase = raw.get("phase", 0)
            noise_sigma = raw.get("noise_sigma", 0.0)
            noise_step = raw.get("noise_step", 60_000)
            ok = True
            if not _is_num(mean):
                bad(f"{path}.mean", "must be a number")
                ok = False
            if not _is_num(amplitude):
                bad(f"{path}.amplitude", "must be a number")
                ok = False
            if not _is_int(period) or period <= 0:
                bad(f"{path}.period", "must be a positive integer (milliseconds)")
                ok = False
            if not _is_int(phase):
                bad(f"{path}.phase", "must be an integer (milliseconds)")
                ok = False
            if not _is_num(noise_sigma) or noise_sigma < 0:
                bad(f"{path}.noise_sigma", "must be a non-negative number")
                ok = False
            if not _is_int(noise_step) or noise_step <= 0:
                bad(f"{path}.noise_step", "must be a positive integer (milliseconds)")
                ok = False
            if ok:
                spec = DiurnalSpec(
                    mean=float(mean),
                    amplitude=float(amplitude),
                    period=period,
                    phase=phase,
                    noise_sigma=float(noise_sigma),
                    noise_step=noise_step,
                )
                signals[sid] = SignalDef(sid, SignalKind.AMBIENT, unit, spec)
        else:
            bad(f"{path}.kind", "must be 'cumulative' or 'ambient'")

    # --- sensors ---
    sensors: list[SensorDescriptor] = []
    sensor_locations: dict[int, str] = {}
    seen_sensor_ids: set[int] = set()
    raw_sensors = doc.get("sensors")
    if not isinstance(raw_sensors, list) or not raw_sensors:
        bad("sensors", "must be a non-empty list")
        raw_sensors = []
    for i, raw in enumerate(raw_sensors):
        path = f"sensors[{i}]"
        if not isinstance(raw, dict):
            bad(path, "must be an object")
            continue
        ok = True
        sensor_id = raw.get("sensor_id")
        if not _is_int(sensor_id) or not (0 <= sensor_id <= MAX_SENSOR_ID):
            bad(f"{path}.sensor_id", "must be an unsigned 32-bit integer")
            ok = False
        elif sensor_id in seen_sensor_ids:
            bad(f"{path}.sensor_id", f"duplicate sensor id {sensor_id}")
            ok = False
        dp = raw.get("dP")
        if not _is_num(dp) or dp <= 0:
            bad(f"{path}.dP", "dP must be positive")
            ok = False
        p0 = raw.get("P0", 0.0)
        if not _is_num(p0):
            bad(f"{path}.P0", "must be a number")
            ok = False
        mode_raw = raw.get("mode")
        mode = None
        if mode_raw in (SensorMode.MONOTONIC.value, SensorMode.BIDIRECTIONAL.value):
            mode = SensorMode(mode_raw)
        else:
            bad(f"{path}.mode", "must be 'MONOTONIC' or 'BIDIRECTIONAL'")
            ok = False
        status_interval = raw.get("status_interval")
        if not _is_int(status_interval) or status_interval <= 0:
            bad(f"{path}.status_interval", "must be a positive integer (milliseconds)")
            ok = False
        signal_ref = raw.get("signal")
        if not isinstance(signal_ref, str) or signal_ref not in signals:
            bad(f"{path}.signal", f"unknown signal id {signal_ref!r}")
            ok = False
        elif mode is SensorMode.MONOTONIC and signals[signal_ref].kind is not SignalKind.CUMULATIVE:
            bad(f"{path}.mode", "MONOTONIC requires a cumulative signal")
            ok = False
        parameter = raw.get("parameter", "")
        unit = raw.get("unit", "")
        location = raw.get("location", "")
        if not ok:
            continue
        seen_sensor_ids.add(sensor_id)
        sensors.append(
            SensorDescriptor(
                sensor_id=sensor_id,
                parameter=str(parameter),
                unit=str(unit),
                dp=float(dp),
                p0=float(p0),
                mode=mode,
                status_interval=status_interval,
                signal_id=signal_ref,
            )
        )
        sensor_locations[sensor_id] = str(location)

    # --- routers ---
    routers: list[RouterDef] = []
    seen_router_ids: set[int] = set()
    raw_routers = doc.get("routers")
    if not isinstance(raw_routers, list) or not raw_routers:
        bad("routers", "must be a non-empty list")
        raw_routers = []
    for i, raw in enumerate(raw_routers):
        path = f"routers[{i}]"
        if not isinstance(raw, dict):
            bad(path, "must be an object")
            continue
        ok = True
        router_id = raw.get("id")
        if not _is_int(router_id) or router_id < 0:
            bad(f"{path}.id", "must be a non-negative integer")
            ok = False
        elif router_id in seen_router_ids:
            bad(f"{path}.id", f"duplicate router id {router_id}")
            ok = False
        flush_interval = raw.get("flush_interval", DEFAULT_FLUSH_INTERVAL)
        if not _is_int(flush_interval) or flush_interval <= 0:
            bad(f"{path}.flush_interval", "must be a positive integer (milliseconds)")
            ok = False
        drift_ppm = raw.get("drift_ppm", 0.0)
        if not _is_num(drift_ppm):
            bad(f"{path}.drift_ppm", "must be a number")
            ok = False
        sync_residual = raw.get("sync_residual", 0)
        if not _is_int(sync_residual):
            bad(f"{path}.sync_residual", "must be an integer (milliseconds)")
            ok = False
        location = raw.get("location", "")
        if not ok:
            continue
        seen_router_ids.add(router_id)
        routers.append(
            RouterDef(
                router_id=router_id,
                location=str(location),
                flush_interval=flush_interval,
                drift_ppm=float(drift_ppm),
                sync_residual=sync_residual,
            )
        )

    # --- coverage ---
    coverage_raw = doc.get("coverage")
    covering: dict[int, tuple[int, ...]] = {}
    if not isinstance(coverage_raw, dict):
        bad("coverage", "must be an object mapping sensor id to router id list")
        coverage_raw = {}
    for key, val in sorted(coverage_raw.items()):
        path = f"coverage.{key}"
        try:
            sensor_id = int(key)
        except (TypeError, ValueError):
            bad(path, "key must be a sensor id")
            continue
        if sensor_id not in seen_sensor_ids:
            bad(path, f"unknown sensor id {sensor_id}")
            continue
        if not isinstance(val, list) or not val:
            bad(path, "must be a non-empty list of router ids")
            continue
        ids = []
        ok = True
        for rid in val:
            if not _is_int(rid) or rid not in seen_router_ids:
                bad(path, f"unknown router id {rid}")
                ok = False
            else:
                ids.append(rid)
        if ok:
            covering[sensor_id] = tuple(sorted(set(ids)))
    for sensor_id in sorted(seen_sensor_ids):
        if str(sensor_id) not in coverage_raw:
            bad(f"coverage.{sensor_id}", "sensor has no covering router")

    # --- channel ---
    channel_raw = doc.get("channel", {})
    if not isinstance(channel_raw, dict):
        bad("channel", "must be an object")
        channel_raw = {}
    loss_prob = channel_raw.get("loss_prob", 0.0)
    if not _is_num(loss_prob) or not (0.0 <= loss_prob <= 1.0):
        bad("channel.loss_prob", "must be a probability in [0, 1]")
        loss_prob = 0.0
    latency = channel_raw.get("latency", DEFAULT_LATENCY)
    if not _is_int(latency) or latency < 0:
        bad("channel.latency", "must be a non-negative integer (milliseconds)")
        latency = DEFAULT_LATENCY
    jitter = channel_raw.get("jitter", 0)
    if not _is_int(jitter) or jitter < 0:
        bad("channel.jitter", "must be a non-negative integer (milliseconds)")
        jitter = 0

    sync_interval = doc.get("sync_interval", DEFAULT_SYNC_INTERVAL)
    if not _is_int(sync_interval) or sync_interval <= 0:
        bad("sync_interval", "must be a positive integer (milliseconds)")
        sync_interval = DEFAULT_SYNC_INTERVAL

    backhaul_delay = doc.get("backhaul_delay", DEFAULT_BACKHAUL_DELAY)
    if not _is_int(backhaul_delay) or backhaul_delay < 0:
        bad("backhaul_delay", "must be a non-negative integer (milliseconds)")
        backhaul_delay = DEFAULT_BACKHAUL_DELAY

    error_grid = doc.get("error_grid", DEFAULT_ERROR_GRID)
    if not _is_int(error_grid) or error_grid <= 0:
        bad("error_grid", "must be a positive integer (milliseconds)")
        error_grid = DEFAULT_ERROR_GRID

    # --- baseline ---
    baseline_raw = doc.get("baseline", {})
    if not isinstance(baseline_raw, dict):
        bad("baseline", "must be an object")
        baseline_raw = {}
    enabled = baseline_raw.get("enabled", False)
    if not isinstance(enabled, bool):
        bad("baseline.enabled", "must be a boolean")
        enabled = False
    dt = baseline_raw.get("dt", "matched")
    if dt != "matched" and (not _is_int(dt) or dt <= 0):
        bad("baseline.dt", "must be a positive integer (milliseconds) or 'matched'")
        dt = "matched"

    outputs = doc.get("outputs", "out")
    if not isinstance(outputs, str) or not outputs:
        bad("outputs", "must be a non-empty string (directory path)")
        outputs = "out"

    if errors:
        raise ScenarioValidationError(errors)

    return Scenario(
        scenario_id=scenario_id,
        seed=seed,
        horizon=horizon,
        signals=signals,
        sensors=sensors,
        sensor_locations=sensor_locations,
        routers=routers,
        coverage=CoverageMap.from_dict(covering),
        channel=ChannelSpec(loss_prob=float(loss_prob), latency=latency, jitter=jitter),
        sync_interval=sync_interval,
        backhaul_delay=backhaul_delay,
        baseline=BaselineDef(enabled=enabled, dt=dt),
        error_grid=error_grid,
        outputs=outputs,
    )


def load(path: str | Path) -> Scenario:
    """Parse and validate a JSON scenario file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError([("", f"invalid JSON: {exc}")]) from exc
    scenario = validate(doc)
    if "scenario_id" not in doc:
        scenario.scenario_id = Path(path).stem
    return scenario
