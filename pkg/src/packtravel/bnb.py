"""Exact solvers: exhaustive enumeration and a depth-first branch-and-bound."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .model import Instance, PackingPlan, evaluate
from .preprocess import PreprocessReport, preprocess

ORACLE_MAX_ITEMS = 24
_CHUNK = 1 << 14


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Limits:
    time: float | None = None  # seconds
    nodes: int | None = None


@dataclass
class SolveResult:
    plan: PackingPlan
    objective: float
    proven_optimal: bool
    nodes: int
    upper_bound: float
    gap: float
    wall_time: float = field(default=0.0, compare=False)
    method: str = "bb"

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "plan": self.plan.bits,
            "objective": self.objective,
            "proven_optimal": self.proven_optimal,
            "nodes": self.nodes,
            "upper_bound": self.upper_bound,
            "gap": self.gap,
        }


def relative_gap(upper: float, lower: float) -> float:
    if upper == lower:
        return 0.0
    if upper == 0:
        return float("inf")
    return 100.0 * (upper - lower) / abs(upper)


def solve_oracle(instance: Instance) -> SolveResult:
    """Enumerate all ``2^m`` plans; ties go to the lexicographically smallest bit vector."""
    start = time.perf_counter()
    m = instance.m
    if m > ORACLE_MAX_ITEMS:
        raise TooLarge(f"{m} items; the oracle enumerates at most {ORACLE_MAX_ITEMS}")
    w = np.array([e.weight for e in instance.items])
    p = np.array([e.profit for e in instance.items])
    # membership[k, i]: item k is on board during leg i
    cities = np.array([e.city for e in instance.items], dtype=int)
    legs = np.arange(1, instance.n + 1)
    onboard = (cities[:, None] <= legs[None, :]).astype(float)
    d = np.array(instance.distances)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)  # first item is the most significant bit

    best_val, best_code = -np.inf, 0
    total = 1 << m
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(float)
        weight = bits @ w
        loads = bits @ (w[:, None] * onboard)
        speeds = instance.v_max - instance.nu * loads
        ok = weight <= instance.capacity
        with np.errstate(divide="ignore", invalid="ignore"):
            cost = instance.rent * (d[None, :] / speeds).sum(axis=1)
        value = np.where(ok, bits @ p - cost, -np.inf)
        k = int(np.argmax(value))
        if value[k] > best_val:
            best_val, best_code = value[k], int(codes[k])

    plan = PackingPlan(tuple(bool((best_code >> int(s)) & 1) for s in shifts))
    obj = evaluate(instance, plan).objective
    return SolveResult(plan, obj, True, total, obj, 0.0, time.perf_counter() - start, "oracle")


class _Search:
    """Cost bookkeeping for the DFS.

    Legs before ``leg`` are settled: every free item that can ride on them has
    already been decided. Open legs carry the compulsory prefix plus the free
    load chosen so far.
    """

    def __init__(self, instance: Instance, report: PreprocessReport, fractional: bool):
        self.inst = instance
        self.free = list(report.remaining)
        self.fractional = fractional
        self.base_prefix = list(itertools.accumulate(report.compulsory_weight))
        self.base_weight = sum(report.compulsory_weight)
        profits = [instance.items[k].profit for k in self.free]
        self.profit_suffix = list(itertools.accumulate(reversed(profits)))[::-1] + [0.0]
        by_ratio = sorted(range(len(self.free)), key=lambda q: (
            -instance.items[self.free[q]].profit / instance.items[self.free[q]].weight, q))
        self.by_ratio = by_ratio

    def leg_cost(self, a: int, free_load: float) -> float:
        inst = self.inst
        speed = inst.v_max - inst.nu * (self.base_prefix[a - 1] + free_load)
        return inst.rent * inst.distances[a - 1] / speed

    def advance(self, settled: float, leg: int, free_load: float, city: int) -> tuple[float, int]:
        for a in range(leg, city):
            settled += self.leg_cost(a, free_load)
        return settled, max(leg, city)

    def committed_cost(self, settled: float, leg: int, free_load: float) -> float:
        return settled + sum(self.leg_cost(a, free_load) for a in range(leg, self.inst.n + 1))

    def optimistic_profit(self, depth: int, free_load: float) -> float:
        if not self.fractional:
            return self.profit_suffix[depth]
        room = self.inst.capacity - self.base_weight - free_load
        total = 0.0
        for q in self.by_ratio:
            if q < depth:
                continue
            e = self.inst.items[self.free[q]]
            if e.weight <= room:
                total += e.profit
                room -= e.weight
            else:
                total += e.profit * room / e.weight
                break
        return total


def solve_bb(instance: Instance, report: PreprocessReport | None = None, limits: Limits = Limits(),
             fractional_bound: bool = False) -> SolveResult:
    """Depth-first branch-and-bound over free items in route order, take-branch first.

    A node fixes decisions for a prefix of the free items. Its bound is the
    committed profit plus all remaining profit, minus the travel cost of the
    committed items alone; extra weight only adds cost, so no completion of
    the node can do better. Compulsory items are committed at the root.
    """
    start = time.perf_counter()
    if report is None:
        report = preprocess(instance)
    s = _Search(instance, report, fractional_bound)
    items = instance.items
    room = instance.capacity - s.base_weight
    base_profit = sum(report.compulsory_profit)

    def bound(depth, free_load, profit, settled, leg):
        return (profit + s.optimistic_profit(depth, free_load)
                - s.committed_cost(settled, leg, free_load))

    incumbent_val = base_profit - s.committed_cost(0.0, 1, 0.0)
    incumbent: tuple[int, ...] = ()

    # node: (depth, free load, profit, settled cost, first open leg, chosen free items)
    root = (0, 0.0, base_profit, 0.0, 1, ())
    stack = [(bound(*root[:5]), root)]
    nodes = 0
    while stack:
        if limits.nodes is not None and nodes >= limits.nodes:
            break
        if limits.time is not None and time.perf_counter() - start > limits.time:
            break
        ub, node = stack.pop()
        if ub <= incumbent_val:
            continue
        nodes += 1
        depth, free_load, profit, settled, leg, chosen = node
        if depth == len(s.free):
            continue
        k = s.free[depth]
        e = items[k]
        settled, leg = s.advance(settled, leg, free_load, e.city)
        skip = (depth + 1, free_load, profit, settled, leg, chosen)
        stack.append((bound(*skip[:5]), skip))
        if free_load + e.weight <= room:
            take = (depth + 1, free_load + e.weight, profit + e.profit, settled, leg, chosen + (k,))
            value = take[2] - s.committed_cost(settled, leg, take[1])
            if value > incumbent_val:
                incumbent_val, incumbent = value, take[5]
            stack.append((bound(*take[:5]), take))

    open_bounds = [ub for ub, _ in stack if ub > incumbent_val]
    plan = PackingPlan.from_indices(instance, report.compulsory + incumbent)
    obj = evaluate(instance, plan).objective
    proven = not open_bounds
    upper = max([obj] + open_bounds)
    gap = 0.0 if proven else relative_gap(upper, obj)
    return SolveResult(plan, obj, proven, nodes, upper, gap, time.perf_counter() - start, "bb")
