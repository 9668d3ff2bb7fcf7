"""Piecewise-linear annealing control schedules.

A schedule is a sequence of (time, s) control points with s in [0, 1].
Forward schedules ramp s linearly from 0 to 1.  Reverse schedules start at
s = 1, ramp down to a dip value s_p, optionally hold there, and quench back
up to 1.  Times are unitless schedule units; physical scales enter through
the driver's time_scale.

The textual format is the literal Python-tuple list, e.g.
"[(0.0, 1.0), (2.5, 0.5), (102.5, 0.5), (102.75, 1.0)]".
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np

from .errors import DataError

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class AnnealSchedule:
    points: tuple[tuple[float, float], ...]
    kind: str

    @property
    def duration(self) -> float:
        return self.points[-1][0]

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.points)

    @property
    def svalues(self) -> tuple[float, ...]:
        return tuple(p[1] for p in self.points)


def make_forward(total_time: float) -> AnnealSchedule:
    """Linear ramp from (0, 0) to (total_time, 1)."""
    if total_time <= 0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    return AnnealSchedule(((0.0, 0.0), (float(total_time), 1.0)), FORWARD)


def make_reverse(
    s_p: float, t_ramp: float, t_pause: float, t_quench: float
) -> AnnealSchedule:
    """Ramp down from s=1 to s_p in t_ramp, hold for t_pause, quench back to
    s=1 in t_quench.  A zero pause collapses the plateau to a single point."""
    if not 0.0 < s_p < 1.0:
        raise ValueError(f"s_p must lie strictly inside (0, 1), got {s_p}")
    if t_ramp <= 0 or t_quench <= 0:
        raise ValueError("ramp and quench times must be positive")
    if t_pause < 0:
        raise ValueError(f"pause time must be non-negative, got {t_pause}")
    t1 = float(t_ramp)
    t2 = t1 + float(t_pause)
    end = t2 + float(t_quench)
    if t_pause == 0:
        points = ((0.0, 1.0), (t1, float(s_p)), (end, 1.0))
    else:
        points = ((0.0, 1.0), (t1, float(s_p)), (t2, float(s_p)), (end, 1.0))
    return AnnealSchedule(points, REVERSE)


def s_at(schedule: AnnealSchedule, t: float) -> float:
    """Linear interpolation between the bracketing control points."""
    if not 0.0 <= t <= schedule.duration:
        raise ValueError(f"t={t} outside [0, {schedule.duration}]")
    return float(np.interp(t, schedule.times, schedule.svalues))


def s_at_many(schedule: AnnealSchedule, ts: np.ndarray) -> np.ndarray:
    if ts.size and (ts.min() < 0.0 or ts.max() > schedule.duration):
        raise ValueError("times outside the schedule range")
    return np.interp(ts, schedule.times, schedule.svalues)


def validate(schedule: AnnealSchedule) -> list[str]:
    """Check every schedule invariant; returns one message per violation
    (empty list means the schedule is valid)."""
    out: list[str] = []
    pts = schedule.points
    if len(pts) < 2:
        out.append("fewer than two control points")
        return out
    times = [p[0] for p in pts]
    svals = [p[1] for p in pts]
    if times[0] != 0.0:
        out.append("first control point must be at t=0")
    if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
        out.append("non-monotone time")
    if any(not 0.0 <= s <= 1.0 for s in svals):
        out.append("s out of range")
    if schedule.kind == FORWARD:
        if svals[0] != 0.0:
            out.append("forward schedule must start at s=0")
        if svals[-1] != 1.0:
            out.append("forward schedule must end at s=1")
        if any(s1 > s2 for s1, s2 in zip(svals, svals[1:])):
            out.append("forward schedule must be non-decreasing in s")
    elif schedule.kind == REVERSE:
        if svals[0] != 1.0 or svals[-1] != 1.0:
            out.append("reverse schedule must start and end at s=1")
        if len(pts) not in (3, 4):
            out.append("reverse schedule must be ramp/(pause)/quench shaped")
        else:
            interior = svals[1:-1]
            if len(set(interior)) != 1:
                out.append("pause plateau must be flat")
            elif not interior[0] < 1.0:
                out.append("dip value must be below 1")
    else:
        out.append(f"unknown schedule kind {schedule.kind!r}")
    return out


def reverse_params(schedule: AnnealSchedule) -> tuple[float, float, float, float]:
    """Recover (s_p, t_ramp, t_pause, t_quench) from a reverse schedule."""
    if schedule.kind != REVERSE or len(schedule.points) not in (3, 4):
        raise ValueError("not a ramp/pause/quench reverse schedule")
    pts = schedule.points
    s_p = pts[1][1]
    t_ramp = pts[1][0]
    if len(pts) == 4:
        t_pause = pts[2][0] - t_ramp
        t_quench = pts[3][0] - pts[2][0]
    else:
        t_pause = 0.0
        t_quench = pts[2][0] - t_ramp
    return s_p, t_ramp, t_pause, t_quench


def format_schedule(schedule: AnnealSchedule) -> str:
    """Render the control points in the canonical textual form."""
    return "[" + ", ".join(f"({t!r}, {s!r})" for t, s in schedule.points) + "]"


def classify_points(points: tuple[tuple[float, float], ...]) -> str:
    """Infer forward vs reverse from the endpoint shape."""
    if points and points[0][1] == 0.0:
        return FORWARD
    return REVERSE


def parse_schedule(text: str, kind: str | None = None) -> AnnealSchedule:
    """Parse the textual control-point list; whitespace variants accepted."""
    try:
        raw = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise DataError(f"cannot parse schedule {text!r}: {exc}") from exc
    try:
        points = tuple((float(t), float(s)) for t, s in raw)
    except (TypeError, ValueError) as exc:
        raise DataError(f"schedule must be a list of (t, s) pairs: {text!r}") from exc
    if len(points) < 2:
        raise DataError(f"schedule needs at least two points: {text!r}")
    schedule = AnnealSchedule(points, kind or classify_points(points))
    problems = validate(schedule)
    if problems:
        raise DataError(f"invalid schedule {text!r}: " + "; ".join(problems))
    return schedule
