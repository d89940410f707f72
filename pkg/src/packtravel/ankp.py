"""Piecewise-linear approximation of travel time ``t(v) = 1/v``.

Time per distance unit ranges over ``[1/v_max, 1/v_min]``; that interval is
split into ``tau`` equal pieces whose endpoints are the breakpoints. Each leg
only gets weight variables for breakpoints of segments its reachable velocity
range touches, which is what keeps the model small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .enkp import x_name
from .mip import MipModel
from .model import EvalResult, Instance, PackingPlan, evaluate
from .preprocess import PreprocessReport


@dataclass(frozen=True)
class Breakpoint:
    speed: float
    time: float


@dataclass(frozen=True)
class SegmentSet:
    tau: int
    breakpoints: tuple[Breakpoint, ...]  # speed decreasing, time increasing
    v_lo: tuple[float, ...] = ()  # per leg reachable velocity range
    v_hi: tuple[float, ...] = ()
    active: tuple[tuple[int, ...], ...] = ()  # A_i, segment a spans breakpoints a-1 and a
    points: tuple[tuple[int, ...], ...] = ()  # B_i

    @property
    def beta(self) -> float:
        n = len(self.points)
        return 100.0 * sum(len(b) for b in self.points) / (self.tau * n)


def build_segments(v_min: float, v_max: float, tau: int) -> tuple[Breakpoint, ...]:
    if tau < 1:
        raise ValueError("tau must be >= 1")
    t_min, t_max = 1.0 / v_max, 1.0 / v_min
    step = (t_max - t_min) / tau
    out = []
    for b in range(tau + 1):
        if b == 0:
            out.append(Breakpoint(v_max, t_min))
        elif b == tau:
            out.append(Breakpoint(v_min, t_max))
        else:
            t = t_min + b * step
            out.append(Breakpoint(1.0 / t, t))
    return tuple(out)


def _speed_at(instance: Instance, load: float) -> float:
    # nu * W can round a hair above v_max - v_min; keep full load on v_min exactly
    if load >= instance.capacity:
        return instance.v_min
    return max(instance.v_max - instance.nu * load, instance.v_min)


def city_velocity_ranges(instance: Instance, report: PreprocessReport) -> tuple[list[float], list[float]]:
    lo, hi = [], []
    wc = wmax = 0.0
    for i in range(instance.n):
        wc += report.compulsory_weight[i]
        wmax += report.max_weight[i]
        hi.append(_speed_at(instance, wc))
        lo.append(_speed_at(instance, min(wmax, instance.capacity)))
    return lo, hi


def active_breakpoints(breakpoints, v_lo, v_hi) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    tau = len(breakpoints) - 1
    A, B = [], []
    for lo, hi in zip(v_lo, v_hi):
        segs = tuple(
            a for a in range(1, tau + 1)
            if breakpoints[a].speed <= hi and lo <= breakpoints[a - 1].speed
        )
        pts = sorted({b for a in segs for b in (a - 1, a)})
        A.append(segs)
        B.append(tuple(pts))
    return tuple(A), tuple(B)


def segment_set(instance: Instance, report: PreprocessReport, tau: int) -> SegmentSet:
    bps = build_segments(instance.v_min, instance.v_max, tau)
    lo, hi = city_velocity_ranges(instance, report)
    A, B = active_breakpoints(bps, lo, hi)
    return SegmentSet(tau, bps, tuple(lo), tuple(hi), A, B)


def build_ankp(instance: Instance, report: PreprocessReport, tau: int) -> MipModel:
    seg = segment_set(instance, report, tau)
    nu = instance.nu
    model = MipModel(name=f"ankp{tau}_{instance.name}" if instance.name else f"ankp{tau}")
    by_city: dict[int, list[int]] = {}
    for k in report.remaining:
        model.add_binary(x_name(instance, k))
        by_city.setdefault(instance.items[k].city, []).append(k)
    for i, pts in enumerate(seg.points, start=1):
        for b in pts:
            model.add_variable(f"y_{i}_{b}", lower=0.0, upper=1.0)
    for i in range(1, instance.n + 1):
        model.add_variable(f"p_{i}", lower=-math.inf, upper=math.inf)
    for i in range(1, instance.n + 1):
        model.add_variable(f"w_{i}")

    for i in range(1, instance.n + 1):
        here = by_city.get(i, [])
        pts = seg.points[i - 1]
        d = instance.distances[i - 1]
        terms = [(1.0, f"p_{i}")]
        if i > 1:
            terms.append((-1.0, f"p_{i - 1}"))
        terms += [(-instance.items[k].profit, x_name(instance, k)) for k in here]
        terms += [(instance.rent * d * seg.breakpoints[b].time, f"y_{i}_{b}") for b in pts]
        model.add_constraint(f"prof_{i}", terms, "=", report.compulsory_profit[i - 1])

        terms = [(1.0, f"w_{i}")]
        if i > 1:
            terms.append((-1.0, f"w_{i - 1}"))
        terms += [(-instance.items[k].weight, x_name(instance, k)) for k in here]
        model.add_constraint(f"load_{i}", terms, "=", report.compulsory_weight[i - 1])

        terms = [(nu, f"w_{i}")] + [(seg.breakpoints[b].speed, f"y_{i}_{b}") for b in pts]
        model.add_constraint(f"speed_{i}", terms, "=", instance.v_max)

        model.add_constraint(f"conv_{i}", [(1.0, f"y_{i}_{b}") for b in pts], "=", 1.0)

    model.add_constraint("cap", [(1.0, f"w_{instance.n}")], "<=", instance.capacity)
    model.set_objective([(1.0, f"p_{instance.n}")])
    return model


def chord_time(breakpoints, speed: float) -> float:
    """Piecewise-linear time per distance unit at ``speed``."""
    fast, slow = breakpoints[0].speed, breakpoints[-1].speed
    speed = min(max(speed, slow), fast)
    for a in range(1, len(breakpoints)):
        hi, lo = breakpoints[a - 1], breakpoints[a]
        if lo.speed <= speed <= hi.speed:
            lam = (hi.speed - speed) / (hi.speed - lo.speed)
            return hi.time + lam * (lo.time - hi.time)
    raise AssertionError("unreachable: speed clamped into the breakpoint range")


def approximate_objective(instance: Instance, plan: PackingPlan, tau: int) -> float:
    """Objective of ``plan`` with chord times in place of ``1/v`` (the model's value for fixed x)."""
    bps = build_segments(instance.v_min, instance.v_max, tau)
    res = evaluate(instance, plan)
    cost = instance.rent * sum(d * chord_time(bps, v)
                               for d, v in zip(instance.distances, res.per_leg_velocity))
    return res.total_profit - cost


def recompute_exact(instance: Instance, plan: PackingPlan) -> EvalResult:
    return evaluate(instance, plan)


def approximation_error_bound(breakpoints) -> float:
    """Largest vertical gap between a chord and ``1/v`` over all segments.

    On a segment between speeds ``a < b`` the gap peaks at ``sqrt(a*b)`` with
    value ``(sqrt(b) - sqrt(a))**2 / (a*b)``.
    """
    worst = 0.0
    for a in range(1, len(breakpoints)):
        lo, hi = breakpoints[a].speed, breakpoints[a - 1].speed
        worst = max(worst, (math.sqrt(hi) - math.sqrt(lo)) ** 2 / (lo * hi))
    return worst


def sidecar(instance: Instance, report: PreprocessReport, model: MipModel, tau: int) -> dict:
    seg = segment_set(instance, report, tau)
    variables = {}
    for k in report.remaining:
        e = instance.items[k]
        variables[x_name(instance, k)] = {"role": "item", "index": k, "city": e.city, "slot": e.slot}
    for i, pts in enumerate(seg.points, start=1):
        for b in pts:
            bp = seg.breakpoints[b]
            variables[f"y_{i}_{b}"] = {"role": "breakpoint", "leg": i, "breakpoint": b,
                                       "speed": bp.speed, "time": bp.time}
    return {
        "schema": "packtravel.ankp-sidecar/1",
        "model": model.name,
        "objective_constant": model.objective_constant,
        "tau": tau,
        "beta": seg.beta,
        "error_bound": approximation_error_bound(seg.breakpoints),
        "compulsory": list(report.compulsory),
        "variables": variables,
        "stats": model.stats(),
    }
