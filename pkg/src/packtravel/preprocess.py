"""Sound removal of unprofitable items and detection of compulsory items.

Three tests, all comparing an item's profit with a travel-cost increment:

* unprofitable (any capacity): ``p <= cost({e}) - cost({})``
* compulsory (only once everything left fits): ``p > cost(M) - cost(M - {e})``
* unprofitable given the compulsory set ``C``: ``p <= cost(C + {e}) - cost(C)``

Comparisons are exact; ties discard, as the inequalities are non-strict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Instance, set_cost


class PreconditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class PreprocessReport:
    compulsory: tuple[int, ...]
    unprofitable: tuple[int, ...]
    remaining: tuple[int, ...]
    alpha: float
    reduced_to_unconstrained: bool
    rounds: int
    compulsory_profit: tuple[float, ...]  # per city
    compulsory_weight: tuple[float, ...]  # per city
    max_weight: tuple[float, ...]  # per city, all non-discarded items

    @property
    def ver(self) -> str:
        return "u" if self.reduced_to_unconstrained else "c"

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(sorted(self.compulsory + self.remaining))

    def as_dict(self) -> dict:
        return {
            "compulsory": list(self.compulsory),
            "unprofitable": list(self.unprofitable),
            "remaining": list(self.remaining),
            "alpha": self.alpha,
            "ver": self.ver,
            "reduced_to_unconstrained": self.reduced_to_unconstrained,
            "rounds": self.rounds,
            "compulsory_profit": list(self.compulsory_profit),
            "compulsory_weight": list(self.compulsory_weight),
            "max_weight": list(self.max_weight),
        }


def _total_weight(instance: Instance, indices: Iterable[int]) -> float:
    return sum(instance.items[k].weight for k in indices)


def _require_unconstrained(instance: Instance, indices):
    if _total_weight(instance, indices) > instance.capacity:
        raise PreconditionViolated("item set does not fit; the test needs the unconstrained case")


def is_unprofitable_case1(instance: Instance, item: int) -> bool:
    e = instance.items[item]
    if e.weight > instance.capacity:
        return True  # can never be packed
    return e.profit <= set_cost(instance, [item]) - set_cost(instance, [])


def is_compulsory(instance: Instance, item: int, current: Iterable[int]) -> bool:
    current = set(current)
    if item not in current:
        raise PreconditionViolated(f"item {item} not in the current item set")
    _require_unconstrained(instance, current)
    without = current - {item}
    return instance.items[item].profit > set_cost(instance, current) - set_cost(instance, without)


def is_unprofitable_case2(instance: Instance, item: int, compulsory: Iterable[int]) -> bool:
    compulsory = set(compulsory)
    if item in compulsory:
        raise PreconditionViolated(f"item {item} is already compulsory")
    _require_unconstrained(instance, compulsory | {item})
    delta = set_cost(instance, compulsory | {item}) - set_cost(instance, compulsory)
    return instance.items[item].profit <= delta


def make_report(
    instance: Instance,
    compulsory: Iterable[int],
    unprofitable: Iterable[int],
    reduced: bool,
    rounds: int = 0,
) -> PreprocessReport:
    compulsory = tuple(sorted(compulsory))
    unprofitable = tuple(sorted(unprofitable))
    gone = set(compulsory) | set(unprofitable)
    remaining = tuple(k for k in range(instance.m) if k not in gone)
    pc = [0.0] * instance.n
    wc = [0.0] * instance.n
    wmax = [0.0] * instance.n
    for k in compulsory:
        e = instance.items[k]
        pc[e.city - 1] += e.profit
        wc[e.city - 1] += e.weight
    for k in compulsory + remaining:
        e = instance.items[k]
        wmax[e.city - 1] += e.weight
    m = instance.m
    kept = len(remaining) + len(compulsory)
    alpha = 100.0 * (m - kept) / m if m else 0.0
    return PreprocessReport(
        compulsory=compulsory,
        unprofitable=unprofitable,
        remaining=remaining,
        alpha=alpha,
        reduced_to_unconstrained=reduced,
        rounds=rounds,
        compulsory_profit=tuple(pc),
        compulsory_weight=tuple(wc),
        max_weight=tuple(wmax),
    )


def no_reduction(instance: Instance) -> PreprocessReport:
    """A report that keeps every item free; lets the model builders run on raw instances."""
    fits = instance.total_weight() <= instance.capacity
    return make_report(instance, (), (), fits)


def preprocess(instance: Instance) -> PreprocessReport:
    unprofitable = [k for k in range(instance.m) if is_unprofitable_case1(instance, k)]
    dropped = set(unprofitable)
    remaining = [k for k in range(instance.m) if k not in dropped]
    compulsory: list[int] = []
    rounds = 1
    reduced = _total_weight(instance, remaining) <= instance.capacity
    if reduced:
        changed = True
        while changed:
            rounds += 1
            changed = False
            current = set(remaining) | set(compulsory)
            newly = [k for k in remaining if is_compulsory(instance, k, current)]
            if newly:
                changed = True
                compulsory.extend(newly)
                remaining = [k for k in remaining if k not in set(newly)]
            gone = [k for k in remaining if is_unprofitable_case2(instance, k, compulsory)]
            if gone:
                changed = True
                unprofitable.extend(gone)
                remaining = [k for k in remaining if k not in set(gone)]
    return make_report(instance, compulsory, unprofitable, reduced, rounds)
