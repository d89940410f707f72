"""Exact mixed 0-1 linear reformulation of the packing problem.

Reciprocal velocities ``y_i = 1 / v_i`` turn the objective linear. With
compulsory weight ``C_i`` already on board at leg ``i`` and the products
``z^i_jk = x_jk * y_i`` linearised through ``L_i <= y_i <= U_i``, the leg
identity ``y_i * (v_max - nu (C_i + load_i)) = 1`` becomes the linear row

    (v_max - nu C_i) y_i - nu * sum_{j<=i,k} w_jk z^i_jk = 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .mip import LinearConstraint, MipModel
from .model import Instance, PackingPlan, leg_loads
from .preprocess import PreprocessReport


@dataclass(frozen=True)
class EnkpBounds:
    L: tuple[float, ...]
    U: tuple[float, ...]
    prefix_wc: tuple[float, ...]
    prefix_wmax: tuple[float, ...]


@dataclass(frozen=True)
class EnkpOptions:
    rlt: bool = False
    dominance: bool = False


def _prefix(values) -> tuple[float, ...]:
    return tuple(itertools.accumulate(values))


def _inv_speed(instance: Instance, load: float) -> float:
    if load >= instance.capacity:
        return 1.0 / instance.v_min
    return 1.0 / (instance.v_max - instance.nu * load)


def compute_bounds(instance: Instance, report: PreprocessReport) -> EnkpBounds:
    wc = _prefix(report.compulsory_weight)
    wmax = _prefix(report.max_weight)
    L = tuple(_inv_speed(instance, c) for c in wc)
    U = tuple(_inv_speed(instance, min(s, instance.capacity)) for s in wmax)
    return EnkpBounds(L, U, wc, wmax)


def x_name(instance: Instance, k: int) -> str:
    e = instance.items[k]
    return f"x_{e.city}_{e.slot}"


def delta_lower(instance: Instance, report: PreprocessReport, j: int, l: int, i: int) -> float:
    """Least cost of carrying item ``l`` of city ``j`` over legs ``j..i-1``.

    Evaluated with only the compulsory load on board, which is the lightest
    any solution of the reduced model can be.
    """
    if not 1 <= j < i <= instance.n + 1:
        raise IndexError(f"need 1 <= j < i <= n+1, got j={j}, i={i}")
    w = instance.items[instance.index_of(j, l)].weight
    wc = _prefix(report.compulsory_weight)
    total = 0.0
    for a in range(j, i):
        base = wc[a - 1]
        total += instance.distances[a - 1] * (_inv_speed(instance, w + base) - _inv_speed(instance, base))
    return instance.rent * total


def delta_upper(instance: Instance, report: PreprocessReport, j: int, l: int, i: int) -> float:
    """Largest cost of carrying item ``l`` of city ``j`` over legs ``j..i-1``.

    The heaviest load after adding the item is ``min(w + S_a, W)``; the
    increment is measured down from there, so it stays a valid bound when
    the cap is active.
    """
    if not 1 <= j < i <= instance.n + 1:
        raise IndexError(f"need 1 <= j < i <= n+1, got j={j}, i={i}")
    w = instance.items[instance.index_of(j, l)].weight
    wmax = _prefix(report.max_weight)
    total = 0.0
    for a in range(j, i):
        top = min(w + wmax[a - 1], instance.capacity)
        total += instance.distances[a - 1] * (_inv_speed(instance, top) - _inv_speed(instance, top - w))
    return instance.rent * total


def dominance_inequalities(instance: Instance, report: PreprocessReport) -> list[LinearConstraint]:
    """Pairwise ordering cuts between free items; every optimal plan satisfies them."""
    cuts = []
    free = report.remaining
    items = instance.items
    for a, b in itertools.permutations(free, 2):
        ea, eb = items[a], items[b]
        xa, xb = x_name(instance, a), x_name(instance, b)
        if ea.city == eb.city:
            # same city: a lighter and more profitable item dominates
            if ea.profit < eb.profit and ea.weight > eb.weight:
                cuts.append(LinearConstraint(
                    f"dom_s_{ea.city}_{ea.slot}_{eb.slot}", ((1.0, xa), (-1.0, xb)), "<=", 0.0))
        elif ea.city < eb.city:
            j, i = ea.city, eb.city
            if ea.weight > eb.weight and ea.profit - delta_lower(instance, report, j, ea.slot, i) < eb.profit:
                cuts.append(LinearConstraint(
                    f"dom_l_{j}_{ea.slot}_{i}_{eb.slot}", ((1.0, xa), (-1.0, xb)), "<=", 0.0))
            if ea.weight < eb.weight and ea.profit - delta_upper(instance, report, j, ea.slot, i) > eb.profit:
                cuts.append(LinearConstraint(
                    f"dom_g_{j}_{ea.slot}_{i}_{eb.slot}", ((1.0, xa), (-1.0, xb)), ">=", 0.0))
    return cuts


def satisfies_dominance(instance: Instance, report: PreprocessReport, plan: PackingPlan) -> bool:
    """Whether ``plan`` meets every dominance cut (needed before seeding the exact model)."""
    values = {x_name(instance, k): float(plan.selected[k]) for k in report.remaining}
    return all(c.satisfied(values) for c in dominance_inequalities(instance, report))


def build_enkp(instance: Instance, report: PreprocessReport,
               options: EnkpOptions = EnkpOptions()) -> MipModel:
    bounds = compute_bounds(instance, report)
    nu = instance.nu
    model = MipModel(name=f"enkp_{instance.name}" if instance.name else "enkp")
    free = report.remaining
    for k in free:
        model.add_binary(x_name(instance, k))
    for i in range(1, instance.n + 1):
        model.add_variable(f"y_{i}", lower=bounds.L[i - 1], upper=bounds.U[i - 1])
    upstream: dict[int, list[int]] = {}
    for i in range(1, instance.n + 1):
        upstream[i] = [k for k in free if instance.items[k].city <= i]
        for k in upstream[i]:
            e = instance.items[k]
            model.add_variable(f"z_{i}_{e.city}_{e.slot}")

    for i in range(1, instance.n + 1):
        terms = [(instance.v_max - nu * bounds.prefix_wc[i - 1], f"y_{i}")]
        for k in upstream[i]:
            e = instance.items[k]
            terms.append((-nu * e.weight, f"z_{i}_{e.city}_{e.slot}"))
        model.add_constraint(f"vel_{i}", terms, "=", 1.0)

    for i in range(1, instance.n + 1):
        Li, Ui = bounds.L[i - 1], bounds.U[i - 1]
        for k in upstream[i]:
            e = instance.items[k]
            tag = f"{i}_{e.city}_{e.slot}"
            z, x, y = f"z_{tag}", x_name(instance, k), f"y_{i}"
            model.add_constraint(f"zux_{tag}", [(1.0, z), (-Ui, x)], "<=", 0.0)
            model.add_constraint(f"zlx_{tag}", [(1.0, z), (-Li, x)], ">=", 0.0)
            model.add_constraint(f"zuy_{tag}", [(1.0, z), (-1.0, y), (-Ui, x)], ">=", -Ui)
            model.add_constraint(f"zly_{tag}", [(1.0, z), (-1.0, y), (-Li, x)], "<=", -Li)

    residual = instance.capacity - sum(report.compulsory_weight)
    if free:
        model.add_constraint(
            "cap", [(instance.items[k].weight, x_name(instance, k)) for k in free], "<=", residual)

    if options.rlt:
        # capacity restricted to cities 1..l, multiplied by y_l, U_l - y_l, y_l - L_l
        for l in range(1, instance.n + 1):
            if not upstream[l]:
                continue
            Ll, Ul = bounds.L[l - 1], bounds.U[l - 1]
            wz = [(instance.items[k].weight, f"z_{l}_{instance.items[k].city}_{instance.items[k].slot}")
                  for k in upstream[l]]
            wx = [(instance.items[k].weight, x_name(instance, k)) for k in upstream[l]]
            model.add_constraint(f"rlt_y_{l}", wz + [(-residual, f"y_{l}")], "<=", 0.0)
            model.add_constraint(
                f"rlt_u_{l}",
                [(Ul * c, v) for c, v in wx] + [(-c, v) for c, v in wz] + [(residual, f"y_{l}")],
                "<=", Ul * residual)
            model.add_constraint(
                f"rlt_l_{l}",
                [(c, v) for c, v in wz] + [(-Ll * c, v) for c, v in wx] + [(-residual, f"y_{l}")],
                "<=", -Ll * residual)

    if options.dominance:
        for cut in dominance_inequalities(instance, report):
            model.add_constraint(cut.name, cut.terms, cut.sense, cut.rhs)

    objective = [(instance.items[k].profit, x_name(instance, k)) for k in free]
    objective += [(-instance.rent * d, f"y_{i}") for i, d in enumerate(instance.distances, start=1)]
    model.set_objective(objective, constant=sum(report.compulsory_profit))
    return model


def implied_values(instance: Instance, report: PreprocessReport, plan: PackingPlan) -> dict[str, float]:
    """Model variable values that ``plan`` induces (plan must contain all compulsory items)."""
    values = {x_name(instance, k): float(plan.selected[k]) for k in report.remaining}
    loads = leg_loads(instance, plan.indices)
    for i, load in enumerate(loads, start=1):
        y = 1.0 / (instance.v_max - instance.nu * load)
        values[f"y_{i}"] = y
        for k in report.remaining:
            e = instance.items[k]
            if e.city <= i:
                values[f"z_{i}_{e.city}_{e.slot}"] = y * plan.selected[k]
    return values


def sidecar(instance: Instance, report: PreprocessReport, model: MipModel,
            options: EnkpOptions) -> dict:
    variables = {}
    for k in report.remaining:
        e = instance.items[k]
        variables[x_name(instance, k)] = {"role": "item", "index": k, "city": e.city, "slot": e.slot}
    for i in range(1, instance.n + 1):
        variables[f"y_{i}"] = {"role": "inverse_speed", "leg": i}
    return {
        "schema": "packtravel.enkp-sidecar/1",
        "model": model.name,
        "objective_constant": model.objective_constant,
        "options": {"rlt": options.rlt, "dominance": options.dominance},
        "compulsory": list(report.compulsory),
        "variables": variables,
        "stats": model.stats(),
    }
