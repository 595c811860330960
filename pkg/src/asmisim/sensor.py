"""Send-on-delta sensor state machine.

A sensor owns almost nothing: a reference level that moves on the fixed
grid p0 + k*dp, a frame counter, and the time of its next status message.
It emits an EVENT frame per quantum crossed and a STATUS frame on a fixed
schedule, and never receives anything. The grid is absolute: the reference
is always exactly p0 + k*dp, which makes level_index a lossless encoding of
the tracked value no matter how many frames the channel drops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .pi_protocol import MsgType, PiFrame
from .signalgen import Signal, crossing_times, reach_tolerance, value_at
from .simkernel import RANK_SENSOR, Kernel, SimTime


class MonotonicityViolated(Exception):
    """A MONOTONIC sensor observed a decreasing parameter."""


class SensorMode(str, Enum):
    MONOTONIC = "MONOTONIC"
    BIDIRECTIONAL = "BIDIRECTIONAL"


@dataclass(frozen=True)
class SensorDescriptor:
    sensor_id: int
    parameter: str
    unit: str
    dp: float
    p0: float
    mode: SensorMode
    status_interval: SimTime
    signal_id: str = ""


@dataclass
class SensorState:
    ref_level_index: int = 0
    seq_no: int = 0
    next_status_at: SimTime = 0
    # Last value seen, kept only to enforce the MONOTONIC precondition.
    last_observed: float | None = field(default=None, repr=False)


def new_state(descriptor: SensorDescriptor) -> SensorState:
    return SensorState(next_status_at=descriptor.status_interval)


def observe(
    state: SensorState,
    descriptor: SensorDescriptor,
    t: SimTime,
    p: float,
) -> list[PiFrame]:
    """Process one observation of the parameter; return frames to transmit.

    Emits one EVENT per grid quantum between the old reference and p, so a
    large excursion produces a burst of +/-1 steps rather than one jump.
    """
    if (
        descriptor.mode is SensorMode.MONOTONIC
        and state.last_observed is not None
        and p < state.last_observed
    ):
        raise MonotonicityViolated(
            f"sensor {descriptor.sensor_id}: {p} < previous {state.last_observed}"
        )
    state.last_observed = p
    frames: list[PiFrame] = []
    dp = descriptor.dp
    while True:
        threshold = descriptor.p0 + (state.ref_level_index + 1) * dp
        if p < threshold - reach_tolerance(threshold, dp):
            break
        state.ref_level_index += 1
        state.seq_no += 1
        frames.append(
            PiFrame(MsgType.EVENT, descriptor.sensor_id, state.seq_no, state.ref_level_index)
        )
    if descriptor.mode is SensorMode.BIDIRECTIONAL:
        while True:
            threshold = descriptor.p0 + (state.ref_level_index - 1) * dp
            if p > threshold + reach_tolerance(threshold, dp):
                break
            state.ref_level_index -= 1
            state.seq_no += 1
            frames.append(
                PiFrame(MsgType.EVENT, descriptor.sensor_id, state.seq_no, state.ref_level_index)
            )
    return frames


def heartbeat(
    state: SensorState,
    descriptor: SensorDescriptor,
    t: SimTime,
) -> PiFrame | None:
    """Emit a STATUS frame when the status schedule is due, else nothing."""
    if t < state.next_status_at:
        return None
    state.seq_no += 1
    state.next_status_at += descriptor.status_interval
    return PiFrame(MsgType.STATUS, descriptor.sensor_id, state.seq_no, state.ref_level_index)


def sampling_driver(
    descriptor: SensorDescriptor,
    signal: Signal,
    kernel: Kernel,
    horizon: SimTime,
    emit,
) -> SensorState:
    """Wire a sensor into a kernel for the whole horizon.

    Observations are scheduled at the exact crossing instants the signal
    oracle reports, so emission times match true crossing times to the
    millisecond; the status schedule is laid out alongside. `emit` is
    called as emit(frame, t) for every frame, in kernel order. Crossings
    are scheduled before heartbeats, so at a shared instant the EVENT
    precedes the STATUS.
    """
    state = new_state(descriptor)
    seq = 0

    def observe_action(t: SimTime):
        def action() -> None:
            for frame in observe(state, descriptor, t, value_at(signal, t)):
                emit(frame, t)

        return action

    def status_action(t: SimTime):
        def action() -> None:
            frame = heartbeat(state, descriptor, t)
            if frame is not None:
                emit(frame, t)

        return action

    seen: set[SimTime] = set()
    for t, _direction in crossing_times(signal, descriptor.p0, descriptor.dp, horizon):
        if t in seen:
            continue
        seen.add(t)
        kernel.schedule(t, (RANK_SENSOR, descriptor.sensor_id, seq), observe_action(t))
        seq += 1
    due = descriptor.status_interval
    while due <= horizon:
        kernel.schedule(due, (RANK_SENSOR, descriptor.sensor_id, seq), status_action(due))
        seq += 1
        due += descriptor.status_interval
    return state
