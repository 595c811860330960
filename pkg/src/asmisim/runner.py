"""End-to-end scenario execution and report/output generation.

One run = one kernel. The wiring follows the system's one-way data flow:

    signal -> sensor -> radio broadcast -> router buffers -> flush batches
           -> backhaul delay -> center ingest

Every stage is scheduled through the kernel with its class rank, so runs
are reproducible event-for-event. After the horizon the kernel runs a
short epilogue (radio latency + jitter + backhaul) and the runner drains
every router buffer straight into the center, so nothing is ever in
flight when the books are closed: emitted = delivered + radio-lost and
delivered = dropped + accepted + deduped + quarantined + malformed hold
exactly, not approximately.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import baseline as ami
from . import radio, router, sensor
from .center import TIMELINE_CSV_COLUMNS, MonitoringCenter
from .rng import derive_seed
from .scenario import Scenario
from .sensor import SensorState
from .signalgen import Signal, value_at
from .simkernel import (
    RANK_CENTER,
    RANK_RADIO,
    RANK_ROUTER,
    Kernel,
    SimTime,
)

COMPARISON_CSV_COLUMNS = (
    "scenario_id",
    "pipeline",
    "sensor_id",
    "sup",
    "mean",
    "rmse",
    "messages",
    "bytes",
)

RUN_SUMMARY_KEYS = ("emitted", "delivered", "deduped", "quarantined", "malformed", "dropped")

TIMELINE_FILE = "timeline.csv"
TRANSPORT_FILE = "transport.jsonl"
COMPARISON_FILE = "comparison.csv"
SUMMARY_FILE = "run_summary.json"


@dataclass
class RunResult:
    scenario: Scenario
    seed: int
    counters: dict[str, int]
    center: MonitoringCenter
    signals: dict[str, Signal]
    sensor_states: dict[int, SensorState]
    router_states: dict[int, router.RouterState]
    transport_rows: list[dict] = field(default_factory=list)
    comparison_rows: list[tuple] = field(default_factory=list)

    def summary(self) -> dict[str, int]:
        return {key: self.counters[key] for key in RUN_SUMMARY_KEYS}


def build_signals(scenario: Scenario, seed: int) -> dict[str, Signal]:
    """One Signal per definition, each on its own derived noise stream."""
    out = {}
    for signal_id, sdef in scenario.signals.items():
        out[signal_id] = Signal(
            kind=sdef.kind,
            spec=sdef.spec,
            unit=sdef.unit,
            seed=derive_seed(seed, "signal", signal_id),
            horizon=scenario.horizon,
        )
    return out


def run_scenario(scenario: Scenario, seed: int | None = None) -> RunResult:
    """Execute a validated scenario; pure function of (scenario, seed)."""
    seed = scenario.seed if seed is None else seed
    kernel = Kernel()
    signals = build_signals(scenario, seed)
    channel = radio.Channel(spec=scenario.channel, seed=seed)

    center = MonitoringCenter(nominal_latency=scenario.channel.latency)
    router_states: dict[int, router.RouterState] = {}
    for rdef in scenario.routers:
        # Routers come up already synced: the residual is their steady
        # offset, and drift accumulates between sync rounds.
        router_states[rdef.router_id] = router.RouterState(
            router_id=rdef.router_id,
            clock_offset=rdef.sync_residual,
            drift_ppm=rdef.drift_ppm,
            last_sync_true_time=0,
            flush_interval=rdef.flush_interval,
            sync_residual=rdef.sync_residual,
        )
        center.register_router(rdef.router_id, rdef.location, rdef.sync_residual)
    for descriptor in scenario.sensors:
        center.register_sensor(descriptor, scenario.sensor_locations[descriptor.sensor_id])

    counters = {
        "emitted": 0,
        "delivered": 0,
        "radio_lost": 0,
        "dropped": 0,
    }
    seqs = {"radio": 0, "ingest": 0}
    transport_rows: list[dict] = []
    spec = scenario.channel
    end_of_receipt = scenario.horizon + spec.latency + spec.jitter
    end_of_run = end_of_receipt + scenario.backhaul_delay

    def deliver_action(router_id: int, data: bytes, at: SimTime):
        state = router_states[router_id]

        def action() -> None:
            router.receive(state, data, at)

        return action

    def emit(frame, t: SimTime) -> None:
        attempts = len(scenario.coverage.routers_for(frame.sensor_id))
        deliveries = radio.broadcast(frame, frame.sensor_id, t, scenario.coverage, channel)
        counters["emitted"] += attempts
        counters["delivered"] += len(deliveries)
        counters["radio_lost"] += attempts - len(deliveries)
        data = radio.frame_bytes(frame)
        for router_id, at in deliveries:
            kernel.schedule(at, (RANK_RADIO, router_id, seqs["radio"]), deliver_action(router_id, data, at))
            seqs["radio"] += 1

    sensor_states: dict[int, SensorState] = {}
    for descriptor in scenario.sensors:
        sensor_states[descriptor.sensor_id] = sensor.sampling_driver(
            descriptor, signals[descriptor.signal_id], kernel, scenario.horizon, emit
        )

    def ship(batch: list[router.ForwardedRecord], at: SimTime) -> None:
        """Send one flushed batch over the (reliable, ordered) backhaul."""
        if not batch:
            return
        for rec in batch:
            transport_rows.append(
                {
                    "router_id": rec.router_id,
                    "local_receipt_time_ms": rec.local_receipt_time,
                    "frame_hex": rec.frame_bytes.hex(),
                }
            )
        router_id = batch[0].router_id

        def ingest_action() -> None:
            for rec in batch:
                center.ingest(rec)

        kernel.schedule(
            at + scenario.backhaul_delay,
            (RANK_CENTER, router_id, seqs["ingest"]),
            ingest_action,
        )
        seqs["ingest"] += 1

    def flush_action(router_id: int, at: SimTime):
        state = router_states[router_id]

        def action() -> None:
            ship(router.flush(state, at), at)
            nxt = at + state.flush_interval
            if nxt <= end_of_receipt:
                kernel.schedule(nxt, (RANK_ROUTER, router_id, nxt), flush_action(router_id, nxt))

        return action

    for rdef in scenario.routers:
        first = rdef.flush_interval
        if first <= end_of_receipt:
            kernel.schedule(first, (RANK_ROUTER, rdef.router_id, first), flush_action(rdef.router_id, first))

    def sync_action(router_id: int, at: SimTime):
        state = router_states[router_id]

        def action() -> None:
            router.apply_time_sync(state, at)
            nxt = at + scenario.sync_interval
            if nxt <= scenario.horizon:
                kernel.schedule(nxt, (RANK_CENTER, router_id, nxt), sync_action(router_id, nxt))

        return action

    for rdef in scenario.routers:
        first = scenario.sync_interval
        if first <= scenario.horizon:
            kernel.schedule(first, (RANK_CENTER, rdef.router_id, first), sync_action(rdef.router_id, first))

    kernel.run_until(end_of_run)

    # Final drain: whatever the periodic flushes missed goes straight in.
    for router_id in sorted(router_states):
        batch = router.flush(router_states[router_id], end_of_run)
        for rec in batch:
            transport_rows.append(
                {
                    "router_id": rec.router_id,
                    "local_receipt_time_ms": rec.local_receipt_time,
                    "frame_hex": rec.frame_bytes.hex(),
                }
            )
            center.ingest(rec)

    counters["dropped"] = sum(s.dropped for s in router_states.values())
    counters["accepted"] = center.counters["accepted"]
    counters["deduped"] = center.counters["deduped"]
    counters["quarantined"] = center.counters["quarantined"]
    counters["malformed"] = center.counters["malformed"]

    result = RunResult(
        scenario=scenario,
        seed=seed,
        counters=counters,
        center=center,
        signals=signals,
        sensor_states=sensor_states,
        router_states=router_states,
        transport_rows=transport_rows,
    )
    result.comparison_rows = _comparison_rows(result)
    return result


def _asmi_error_report(result: RunResult, sensor_id: int) -> ami.ErrorReport:
    """Reconstruction error of the event pipeline on the uniform grid."""
    scenario = result.scenario
    descriptor = result.center.sensors[sensor_id].descriptor
    signal = result.signals[descriptor.signal_id]
    grid = scenario.error_grid
    sup = total = total_sq = 0.0
    n = 0
    t = 0
    while t <= scenario.horizon:
        value, _unc = result.center.reconstruct(sensor_id, t)
        err = abs(value_at(signal, t) - value)
        sup = max(sup, err)
        total += err
        total_sq += err * err
        n += 1
        t += grid
    return ami.ErrorReport(sup=sup, mean=total / n, rmse=math.sqrt(total_sq / n), n_points=n)


def _comparison_rows(result: RunResult) -> list[tuple]:
    scenario = result.scenario
    rows = []
    for descriptor in sorted(scenario.sensors, key=lambda d: d.sensor_id):
        sensor_id = descriptor.sensor_id
        signal = result.signals[descriptor.signal_id]
        messages = result.sensor_states[sensor_id].seq_no
        report = _asmi_error_report(result, sensor_id)
        rows.append(
            (
                scenario.scenario_id,
                "ASMI",
                sensor_id,
                report.sup,
                report.mean,
                report.rmse,
                messages,
                messages * ami.AMI_FRAME_BYTES,
            )
        )
        if not scenario.baseline.enabled:
            continue
        if scenario.baseline.dt == "matched":
            dt = ami.matched_budget_interval(scenario.horizon, max(1, messages))
        else:
            dt = scenario.baseline.dt
        samples = ami.poll(signal, dt, scenario.horizon)
        ami_report = ami.error_stats(
            signal,
            samples,
            scenario.horizon,
            grid=scenario.error_grid,
            p0=value_at(signal, 0),
        )
        rows.append(
            (
                scenario.scenario_id,
                "AMI",
                sensor_id,
                ami_report.sup,
                ami_report.mean,
                ami_report.rmse,
                len(samples),
                len(samples) * ami.AMI_FRAME_BYTES,
            )
        )
    return rows


def write_outputs(result: RunResult, out_dir: str | Path) -> dict[str, Path]:
    """Write the four run artifacts; byte-stable for a given (scenario, seed)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    timeline_path = out / TIMELINE_FILE
    with timeline_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMELINE_CSV_COLUMNS)
        for row in result.center.timeline_rows():
            writer.writerow(row)
    paths[TIMELINE_FILE] = timeline_path

    transport_path = out / TRANSPORT_FILE
    with transport_path.open("w") as fh:
        for row in result.transport_rows:
            fh.write(json.dumps(row, separators=(", ", ": ")) + "\n")
    paths[TRANSPORT_FILE] = transport_path

    comparison_path = out / COMPARISON_FILE
    with comparison_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_CSV_COLUMNS)
        for row in result.comparison_rows:
            writer.writerow(row)
    paths[COMPARISON_FILE] = comparison_path

    summary_path = out / SUMMARY_FILE
    summary_path.write_text(json.dumps(result.summary(), indent=2) + "\n")
    paths[SUMMARY_FILE] = summary_path
    return paths
