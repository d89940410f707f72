"""Nonlinear knapsack on a fixed route: evaluation, preprocessing, exact search and MIP emitters."""

__version__ = "0.1.0"

from .model import (DegenerateVelocity, EvalResult, Instance, InvalidInstance, Item, PackingPlan,
                    evaluate, leg_velocity, nu, total_travel_cost)
from .preprocess import PreprocessReport, no_reduction, preprocess
from .bnb import Limits, SolveResult, solve_bb, solve_oracle

__all__ = [
    "DegenerateVelocity", "EvalResult", "Instance", "InvalidInstance", "Item", "PackingPlan",
    "evaluate", "leg_velocity", "nu", "total_travel_cost", "PreprocessReport", "no_reduction",
    "preprocess", "Limits", "SolveResult", "solve_bb", "solve_oracle",
]
