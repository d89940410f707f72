"""Subset-sum instances encoded as unconstrained single-leg packing instances.

One leg of length 1, item profits and weights both equal to the subset-sum
values, ``W = sum(S)``, ``v_max = 2``, ``v_min = 1`` and rent
``R* = W (2 - Q/W)^2``. Packing weight ``w`` is then worth
``f(w) = w - R* / (2 - w/W)``, maximised exactly at ``w = Q``, so the
subset-sum answer is YES iff the packing optimum reaches ``f(Q) = 2 (Q - W)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import Instance


@dataclass(frozen=True)
class SspInstance:
    values: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(s) for s in self.values))
        if not self.values:
            raise ValueError("need at least one value")
        if any(s <= 0 for s in self.values):
            raise ValueError("values must be positive integers")
        if self.target <= 0:
            raise ValueError("target must be a positive integer")
        if self.target > sum(self.values):
            raise ValueError("target exceeds the sum of values (trivially NO)")


def rent_star(ssp: SspInstance) -> float:
    W = sum(ssp.values)
    return W * (2 - ssp.target / W) ** 2


def threshold(ssp: SspInstance) -> float:
    # closed form of f(Q); avoids rounding right at the YES/NO boundary
    return float(2 * (ssp.target - sum(ssp.values)))


def f_rstar(w: float, W: float, R_star: float) -> float:
    if not 0 <= w <= W:
        raise ValueError(f"w={w} outside [0, {W}]")
    return w - R_star / (2 - w / W)


def g_rstar(ssp: SspInstance, x: Sequence[int]) -> float:
    """Objective of a 0/1 selection ``x`` over the subset-sum values."""
    W = sum(ssp.values)
    load = sum(s * xi for s, xi in zip(ssp.values, x))
    return load - rent_star(ssp) / (2 - load / W)


def ssp_to_nkpu(ssp: SspInstance) -> tuple[Instance, float]:
    W = sum(ssp.values)
    instance = Instance.build(
        distances=[1.0],
        city_items=[[(s, s) for s in ssp.values]],
        capacity=W,
        v_min=1.0,
        v_max=2.0,
        rent=rent_star(ssp),
        name=f"ssp-q{len(ssp.values)}-Q{ssp.target}",
    )
    return instance, threshold(ssp)
