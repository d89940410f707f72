"""Instances, packing plans and exact evaluation of the route-dependent objective.

A vehicle drives a fixed route of ``n`` legs. Items picked up in cities
``1..i`` slow it down on leg ``i``; velocity drops linearly with load from
``v_max`` (empty) to ``v_min`` (full). The objective is total profit minus
``rent * sum(d_i / v_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class InvalidInstance(ValueError):
    pass


class DegenerateVelocity(ArithmeticError):
    """Raised when an overloaded plan drives some leg velocity to <= 0."""


@dataclass(frozen=True)
class Item:
    city: int
    slot: int
    profit: float
    weight: float

    def __post_init__(self):
        if not self.profit > 0:
            raise InvalidInstance(f"item {self.city}/{self.slot}: profit must be > 0")
        if not self.weight > 0:
            raise InvalidInstance(f"item {self.city}/{self.slot}: weight must be > 0")
        if self.city < 1 or self.slot < 1:
            raise InvalidInstance(f"item {self.city}/{self.slot}: indices are 1-based")


@dataclass(frozen=True)
class Instance:
    """A route with items.

    ``distances[i-1]`` is the length of leg ``i`` (city ``i`` to ``i+1``).
    ``items`` is kept sorted city-major, slot-minor; that order is the global
    item index used by plans, MIP variables and every emitted file.
    """

    distances: tuple[float, ...]
    items: tuple[Item, ...]
    capacity: float
    v_min: float
    v_max: float
    rent: float
    name: str = ""
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        items = tuple(sorted(self.items, key=lambda e: (e.city, e.slot)))
        object.__setattr__(self, "items", items)
        if not self.distances:
            raise InvalidInstance("route needs at least one leg")
        if any(not d > 0 for d in self.distances):
            raise InvalidInstance("distances must be > 0")
        if not 0 < self.v_min < self.v_max:
            raise InvalidInstance("need 0 < v_min < v_max")
        if not self.capacity > 0:
            raise InvalidInstance("capacity must be > 0")
        if not self.rent > 0:
            raise InvalidInstance("rent must be > 0")
        index = {}
        for k, e in enumerate(items):
            if e.city > self.n:
                raise InvalidInstance(f"item {e.city}/{e.slot} lies beyond the last leg")
            if (e.city, e.slot) in index:
                raise InvalidInstance(f"duplicate item {e.city}/{e.slot}")
            index[(e.city, e.slot)] = k
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(
        cls,
        distances: Sequence[float],
        city_items: Sequence[Sequence[tuple[float, float]]],
        capacity: float,
        v_min: float,
        v_max: float,
        rent: float,
        name: str = "",
    ) -> "Instance":
        """Build from per-city lists of ``(profit, weight)`` pairs; slots numbered from 1."""
        items = [
            Item(city, slot, float(p), float(w))
            for city, bucket in enumerate(city_items, start=1)
            for slot, (p, w) in enumerate(bucket, start=1)
        ]
        return cls(tuple(distances), tuple(items), float(capacity), float(v_min),
                   float(v_max), float(rent), name)

    @property
    def n(self) -> int:
        return len(self.distances)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def nu(self) -> float:
        return (self.v_max - self.v_min) / self.capacity

    def index_of(self, city: int, slot: int) -> int:
        return self._index[(city, slot)]

    def city_indices(self, city: int) -> list[int]:
        return [k for k, e in enumerate(self.items) if e.city == city]

    def total_weight(self) -> float:
        return sum(e.weight for e in self.items)


@dataclass(frozen=True)
class PackingPlan:
    selected: tuple[bool, ...]

    @classmethod
    def empty(cls, instance: Instance) -> "PackingPlan":
        return cls((False,) * instance.m)

    @classmethod
    def from_indices(cls, instance: Instance, indices: Iterable[int]) -> "PackingPlan":
        chosen = set(indices)
        return cls(tuple(k in chosen for k in range(instance.m)))

    @classmethod
    def from_bits(cls, bits: str) -> "PackingPlan":
        bits = bits.strip()
        if set(bits) - {"0", "1"}:
            raise ValueError(f"plan bits must be 0/1, got {bits!r}")
        return cls(tuple(b == "1" for b in bits))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.selected) if s)

    @property
    def bits(self) -> str:
        return "".join("1" if s else "0" for s in self.selected)

    def __len__(self):
        return len(self.selected)


@dataclass(frozen=True)
class EvalResult:
    objective: float
    travel_cost: float
    total_profit: float
    total_weight: float
    per_leg_velocity: tuple[float, ...]
    feasible: bool

    def as_dict(self) -> dict:
        return {
            "objective": self.objective,
            "travel_cost": self.travel_cost,
            "total_profit": self.total_profit,
            "total_weight": self.total_weight,
            "per_leg_velocity": list(self.per_leg_velocity),
            "feasible": self.feasible,
        }


def nu(instance: Instance) -> float:
    return instance.nu


def leg_loads(instance: Instance, indices: Iterable[int]) -> list[float]:
    """Cumulative selected weight on each leg (index 0 is leg 1)."""
    per_city = [0.0] * instance.n
    for k in indices:
        e = instance.items[k]
        per_city[e.city - 1] += e.weight
    loads, acc = [], 0.0
    for w in per_city:
        acc += w
        loads.append(acc)
    return loads


def cost_of_loads(instance: Instance, loads: Sequence[float]) -> float:
    speeds = [instance.v_max - instance.nu * load for load in loads]
    for i, v in enumerate(speeds, start=1):
        if v <= 0:
            raise DegenerateVelocity(f"velocity {v} on leg {i}")
    return instance.rent * sum(d / v for d, v in zip(instance.distances, speeds))


def set_cost(instance: Instance, indices: Iterable[int]) -> float:
    """Total travel cost when exactly the items at ``indices`` are carried."""
    return cost_of_loads(instance, leg_loads(instance, indices))


def _check_plan(instance: Instance, plan: PackingPlan):
    if len(plan) != instance.m:
        raise ValueError(f"plan has {len(plan)} entries, instance has {instance.m} items")


def leg_velocity(instance: Instance, plan: PackingPlan, i: int) -> float:
    if not 1 <= i <= instance.n:
        raise IndexError(f"leg {i} outside 1..{instance.n}")
    _check_plan(instance, plan)
    load = sum(instance.items[k].weight for k in plan.indices if instance.items[k].city <= i)
    return instance.v_max - instance.nu * load


def total_travel_cost(instance: Instance, subset: PackingPlan) -> float:
    _check_plan(instance, subset)
    return set_cost(instance, subset.indices)


def evaluate(instance: Instance, plan: PackingPlan) -> EvalResult:
    _check_plan(instance, plan)
    chosen = plan.indices
    loads = leg_loads(instance, chosen)
    cost = cost_of_loads(instance, loads)
    profit = sum(instance.items[k].profit for k in chosen)
    weight = sum(instance.items[k].weight for k in chosen)
    return EvalResult(
        objective=profit - cost,
        travel_cost=cost,
        total_profit=profit,
        total_weight=weight,
        per_leg_velocity=tuple(instance.v_max - instance.nu * load for load in loads),
        feasible=weight <= instance.capacity,
    )
