"""Independent checkers used by the tests.

Nothing here calls the package's evaluation, search or chord code: the
brute force re-derives the objective from the raw instance fields, and the
model checkers work only from the rows of an emitted ``MipModel``.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict

import numpy as np

from packtravel.enkp import x_name
from packtravel.model import Instance


def objective_direct(inst: Instance, bits) -> float:
    """Profit minus rent * sum d_i / v_i, written out longhand."""
    nu = (inst.v_max - inst.v_min) / inst.capacity
    total = 0.0
    for i in range(1, inst.n + 1):
        load = sum(e.weight for e, b in zip(inst.items, bits) if b and e.city <= i)
        here = sum(e.profit for e, b in zip(inst.items, bits) if b and e.city == i)
        total += here - inst.rent * inst.distances[i - 1] / (inst.v_max - nu * load)
    return total


def brute_force(inst: Instance, allowed=None):
    """Best feasible plan by plain enumeration; returns (value, bits).

    ``allowed`` restricts which item indices may be chosen.
    """
    best, best_bits = -float("inf"), None
    for bits in itertools.product((0, 1), repeat=inst.m):
        if allowed is not None and any(b and k not in allowed for k, b in enumerate(bits)):
            continue
        if sum(e.weight for e, b in zip(inst.items, bits) if b) > inst.capacity:
            continue
        val = objective_direct(inst, bits)
        if val > best:
            best, best_bits = val, bits
    return best, best_bits


def optimal_plans(inst: Instance, tol: float = 1e-9):
    """All feasible plans within ``tol`` of the optimum."""
    best, _ = brute_force(inst)
    out = []
    for bits in itertools.product((0, 1), repeat=inst.m):
        if sum(e.weight for e, b in zip(inst.items, bits) if b) > inst.capacity:
            continue
        if objective_direct(inst, bits) >= best - tol:
            out.append(bits)
    return best, out


def ssp_brute_force(values, target) -> bool:
    return any(sum(c) == target for r in range(1, len(values) + 1)
               for c in itertools.combinations(values, r))


# --- random corpus -------------------------------------------------------------

def random_instance(rng: random.Random, style: str = "uncorr", max_n: int = 5, max_m: int = 10,
                    w_frac: float | None = None) -> Instance:
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    buckets = [[] for _ in range(n)]
    for _ in range(m):
        w = rng.randint(1, 30)
        if style == "uncorr":
            p = rng.randint(1, 100)
        else:  # bounded strongly correlated
            p = w + 15
        buckets[rng.randrange(n)].append((p, w))
    total = sum(w for b in buckets for _, w in b)
    frac = rng.uniform(0.3, 1.2) if w_frac is None else w_frac
    W = max(1, round(frac * total))
    dists = [rng.randint(1, 10) for _ in range(n)]
    rent = rng.choice([0.5, 1.0, 2.0, 3.0, 5.0])
    return Instance.build(dists, buckets, W, 0.1, 1.0, rent, name=f"rnd-{style}")


def corpus(count: int = 200, seed: int = 20150518, **kw) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, "uncorr" if k % 2 == 0 else "bsc", **kw) for k in range(count)]


# --- model checkers ------------------------------------------------------------

def _reduced_rows(model, fixed):
    """Rows with fixed variables moved to the right-hand side."""
    for con in model.constraints:
        coeffs = {}
        rhs = con.rhs
        for a, v in con.terms:
            if v in fixed:
                rhs -= a * fixed[v]
            else:
                coeffs[v] = coeffs.get(v, 0.0) + a
        yield con, coeffs, rhs


def implied_point(model, fixed: dict[str, float]) -> dict[str, float]:
    """Solve for the continuous variables once the binaries are fixed.

    Equalities are taken as they stand; a pair of opposite inequalities with
    identical left side and right side is promoted to an equality. The
    system must then have full column rank.
    """
    cont = [v.name for v in model.variables if v.name not in fixed]
    col = {name: j for j, name in enumerate(cont)}
    rows, rhs = [], []
    halves = defaultdict(dict)
    for con, coeffs, b in _reduced_rows(model, fixed):
        coeffs = {v: a for v, a in coeffs.items() if a != 0.0}
        if not coeffs:
            continue
        if con.sense == "=":
            rows.append(coeffs)
            rhs.append(b)
        else:
            key = tuple(sorted(coeffs.items()))
            halves[(key, b)][con.sense] = True
    for (key, b), senses in halves.items():
        if len(senses) == 2:
            rows.append(dict(key))
            rhs.append(b)
    A = np.zeros((len(rows), len(cont)))
    for r, coeffs in enumerate(rows):
        for v, a in coeffs.items():
            A[r, col[v]] = a
    sol, _, rank, _ = np.linalg.lstsq(A, np.array(rhs), rcond=None)
    if rank < len(cont):
        raise ValueError(f"implied system has rank {rank} < {len(cont)} unknowns")
    point = dict(fixed)
    point.update({name: float(sol[j]) for j, name in enumerate(cont)})
    return point


def point_violations(model, point, tol=1e-9) -> list[str]:
    bad = [c.name for c in model.constraints if not c.satisfied(point, tol)]
    for v in model.variables:
        if not (v.lower - tol <= point[v.name] <= v.upper + tol):
            bad.append(f"bound:{v.name}")
    return bad


def binary_feasible(model, fixed) -> bool:
    """Rows that only involve binaries (capacity, cuts) hold at ``fixed``."""
    for con, coeffs, b in _reduced_rows(model, fixed):
        if coeffs:
            continue
        lhs = 0.0
        if con.sense == "<=" and not lhs <= b + 1e-9:
            return False
        if con.sense == ">=" and not lhs >= b - 1e-9:
            return False
        if con.sense == "=" and abs(b) > 1e-9:
            return False
    return True


def enumerate_model(inst, report, model):
    """Yield (full plan bits, model objective, implied point) for every feasible x."""
    free = report.remaining
    for xs in itertools.product((0.0, 1.0), repeat=len(free)):
        fixed = {x_name(inst, k): v for k, v in zip(free, xs)}
        if not binary_feasible(model, fixed):
            continue
        point = implied_point(model, fixed)
        bits = [k in report.compulsory for k in range(inst.m)]
        for k, v in zip(free, xs):
            bits[k] = bool(v)
        yield tuple(bits), model.objective_value(point), point


def ankp_fixed_value(model, fixed: dict[str, float], n: int) -> float:
    """Optimal ``p_n`` of the piecewise model with the binaries fixed.

    For fixed ``x`` the legs decouple: ``w_i`` follows from the load rows and
    each leg is a two-row LP over its breakpoint weights. Its basic solutions
    use one or two breakpoints, so enumerate them all and keep the cheapest.
    """
    def row(name):
        return model.constraint(name)

    w_prev = p_prev = 0.0
    for i in range(1, n + 1):
        load = row(f"load_{i}")
        w = load.rhs + w_prev + sum(-a * fixed[v] for a, v in load.terms if v in fixed)
        speed = row(f"speed_{i}")
        nu = next(a for a, v in speed.terms if v == f"w_{i}")
        ys = [v for a, v in speed.terms if v.startswith("y_")]
        s = np.array([a for a, v in speed.terms if v.startswith("y_")])
        prof = row(f"prof_{i}")
        cost_of = {v: a for a, v in prof.terms}
        c = np.array([cost_of[v] for v in ys])
        target = speed.rhs - nu * w
        # nu * W may land an ulp outside the breakpoint range at full load
        if s.min() - 1e-12 <= target < s.min():
            target = s.min()
        elif s.max() < target <= s.max() + 1e-12:
            target = s.max()
        best = np.inf
        # single breakpoint
        hit = np.abs(s - target) <= 1e-12
        if hit.any():
            best = c[hit].min()
        # pairs straddling the target
        lo = np.where(s < target)[0]
        hi = np.where(s > target)[0]
        if len(lo) and len(hi):
            S1, S2 = np.meshgrid(s[lo], s[hi], indexing="ij")
            C1, C2 = np.meshgrid(c[lo], c[hi], indexing="ij")
            lam = (S2 - target) / (S2 - S1)
            best = min(best, float((lam * C1 + (1 - lam) * C2).min()))
        if not np.isfinite(best):
            raise ValueError(f"leg {i}: speed {target} outside the active breakpoints")
        gain = sum(-a * fixed[v] for a, v in prof.terms if v in fixed)
        p_prev = p_prev + prof.rhs + gain - best
        w_prev = w
    return p_prev
