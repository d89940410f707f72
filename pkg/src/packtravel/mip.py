"""Solver-agnostic mixed 0-1 linear model and a CPLEX-LP file writer."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
SENSES = ("<=", "=", ">=")
# CPLEX rejects LP lines longer than 255 characters
MAX_LINE = 200


class DuplicateName(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "continuous"  # or "binary"
    lower: float = 0.0
    upper: float = math.inf


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: tuple[tuple[float, str], ...]
    sense: str
    rhs: float

    def activity(self, values: dict[str, float]) -> float:
        return sum(c * values[v] for c, v in self.terms)

    def satisfied(self, values: dict[str, float], tol: float = 1e-9) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


VarRef = Union[Variable, str]


def _merge(terms: Iterable[tuple[float, VarRef]]) -> tuple[tuple[float, str], ...]:
    merged: dict[str, float] = {}
    for coef, var in terms:
        name = var.name if isinstance(var, Variable) else var
        merged[name] = merged.get(name, 0.0) + float(coef)
    return tuple((c, v) for v, c in merged.items() if c != 0.0)


@dataclass
class MipModel:
    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[LinearConstraint] = field(default_factory=list)
    objective: tuple[tuple[float, str], ...] = ()
    objective_constant: float = 0.0
    sense: str = "maximize"

    def __post_init__(self):
        self._vars = {v.name: v for v in self.variables}
        self._cons = {c.name: c for c in self.constraints}

    def add_variable(self, name: str, kind: str = "continuous", lower: float = 0.0,
                     upper: float = math.inf) -> Variable:
        if not NAME_RE.match(name):
            raise ValueError(f"bad variable name {name!r}")
        if name in self._vars:
            raise DuplicateName(name)
        if kind == "binary":
            lower, upper = 0.0, 1.0
        elif kind != "continuous":
            raise ValueError(f"unknown variable kind {kind!r}")
        if lower > upper:
            raise ValueError(f"{name}: lower bound {lower} above upper bound {upper}")
        var = Variable(name, kind, float(lower), float(upper))
        self.variables.append(var)
        self._vars[name] = var
        return var

    def add_binary(self, name: str) -> Variable:
        return self.add_variable(name, "binary")

    def add_constraint(self, name: str, terms: Iterable[tuple[float, VarRef]], sense: str,
                       rhs: float) -> LinearConstraint:
        if not NAME_RE.match(name):
            raise ValueError(f"bad constraint name {name!r}")
        if name in self._cons:
            raise DuplicateName(name)
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        merged = _merge(terms)
        self._check_refs(merged)
        con = LinearConstraint(name, merged, sense, float(rhs))
        self.constraints.append(con)
        self._cons[name] = con
        return con

    def set_objective(self, terms: Iterable[tuple[float, VarRef]], constant: float = 0.0):
        merged = _merge(terms)
        self._check_refs(merged)
        self.objective = merged
        self.objective_constant = float(constant)

    def _check_refs(self, terms):
        for _, v in terms:
            if v not in self._vars:
                raise KeyError(f"undeclared variable {v!r}")

    def variable(self, name: str) -> Variable:
        return self._vars[name]

    def constraint(self, name: str) -> LinearConstraint:
        return self._cons[name]

    def objective_value(self, values: dict[str, float]) -> float:
        """Objective including the constant the LP file cannot carry."""
        return self.objective_constant + sum(c * values[v] for c, v in self.objective)

    @property
    def binaries(self) -> list[Variable]:
        return [v for v in self.variables if v.kind == "binary"]

    def stats(self) -> dict:
        return {
            "variables": len(self.variables),
            "binaries": len(self.binaries),
            "constraints": len(self.constraints),
        }


def fmt(x: float) -> str:
    if x == 0:
        x = 0.0  # never print -0
    return "%.17g" % x


def _signed(x: float) -> str:
    if x == 0:
        x = 0.0
    return "%+.17g" % x


def _wrap(head: str, pieces: list[str], tail: str = "") -> list[str]:
    lines, line = [], head
    for piece in pieces:
        if len(line) + 1 + len(piece) > MAX_LINE and line.strip():
            lines.append(line)
            line = "   "
        line = f"{line} {piece}"
    if tail:
        if len(line) + 1 + len(tail) > MAX_LINE:
            lines.append(line)
            line = "   "
        line = f"{line} {tail}"
    lines.append(line)
    return lines


def _bound_line(v: Variable) -> str | None:
    lo, hi = v.lower, v.upper
    if lo == -math.inf and hi == math.inf:
        return f" {v.name} free"
    if lo == hi:
        return f" {v.name} = {fmt(lo)}"
    if hi == math.inf:
        return f" {v.name} >= {fmt(lo)}"
    left = "-inf" if lo == -math.inf else fmt(lo)
    return f" {left} <= {v.name} <= {fmt(hi)}"


def lp_text(model: MipModel) -> str:
    out = [f"\\ Problem: {model.name}"]
    if model.objective_constant != 0.0:
        out.append(f"\\ Objective constant: {fmt(model.objective_constant)}")
    out.append("Maximize" if model.sense == "maximize" else "Minimize")
    out.extend(_wrap(" obj:", [f"{_signed(c)} {v}" for c, v in model.objective]))
    out.append("Subject To")
    for con in model.constraints:
        if not con.terms:
            raise ValueError(f"constraint {con.name} has no terms")
        out.extend(_wrap(f" {con.name}:", [f"{_signed(c)} {v}" for c, v in con.terms],
                         f"{con.sense} {fmt(con.rhs)}"))
    bounds = [_bound_line(v) for v in model.variables if v.kind == "continuous"]
    if bounds:
        out.append("Bounds")
        out.extend(bounds)
    if model.binaries:
        out.append("Binaries")
        out.extend(_wrap("", [v.name for v in model.binaries]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: MipModel, sink: Union[str, Path, IO[bytes], None] = None) -> bytes:
    data = lp_text(model).encode("ascii")
    if sink is None:
        return data
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(data)
    else:
        sink.write(data)
    return data
