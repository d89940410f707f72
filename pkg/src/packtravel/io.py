"""Instance, tour and result formats.

* native JSON instances (lossless, used by tests and ``gen-ssp``)
* TTP benchmark files: key/value header, ``NODE_COORD_SECTION``, ``ITEMS SECTION``
* tours: a permutation of ``1..DIMENSION``, bare or inside ``TOUR_SECTION``
* CSV result rows and plain ``name value`` solution files
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .model import Instance, Item, PackingPlan
from .preprocess import PreprocessReport

INSTANCE_SCHEMA = "packtravel.instance/1"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


class CountMismatch(ParseError):
    pass


class InvalidPermutation(ValueError):
    pass


# --- native JSON ---------------------------------------------------------------

def instance_to_dict(instance: Instance, meta: dict | None = None) -> dict:
    doc = {
        "schema": INSTANCE_SCHEMA,
        "name": instance.name,
        "distances": list(instance.distances),
        "capacity": instance.capacity,
        "v_min": instance.v_min,
        "v_max": instance.v_max,
        "rent": instance.rent,
        "items": [{"city": e.city, "slot": e.slot, "profit": e.profit, "weight": e.weight}
                  for e in instance.items],
    }
    if meta:
        doc["meta"] = meta
    return doc


def instance_from_dict(doc: dict) -> Instance:
    if doc.get("schema") != INSTANCE_SCHEMA:
        raise ParseError(f"expected schema {INSTANCE_SCHEMA!r}, got {doc.get('schema')!r}")
    try:
        items = tuple(Item(int(e["city"]), int(e["slot"]), float(e["profit"]), float(e["weight"]))
                      for e in doc["items"])
        return Instance(
            distances=tuple(float(d) for d in doc["distances"]),
            items=items,
            capacity=float(doc["capacity"]),
            v_min=float(doc["v_min"]),
            v_max=float(doc["v_max"]),
            rent=float(doc["rent"]),
            name=str(doc.get("name", "")),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed instance document: {exc}") from exc


def dump_instance(instance: Instance, meta: dict | None = None) -> str:
    return json.dumps(instance_to_dict(instance, meta), indent=1) + "\n"


def save_instance(instance: Instance, path, meta: dict | None = None):
    Path(path).write_text(dump_instance(instance, meta))


def load_json_instance(path) -> tuple[Instance, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, str(path)) from exc
    return instance_from_dict(doc), doc.get("meta", {})


# --- TTP benchmark files -------------------------------------------------------

@dataclass(frozen=True)
class TtpData:
    name: str
    dimension: int
    capacity: float
    v_min: float
    v_max: float
    rent: float
    edge_weight_type: str
    coords: dict[int, tuple[float, float]]
    items: tuple[tuple[int, float, float, int], ...]  # (index, profit, weight, node)


_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "KNAPSACK DATA TYPE": "data_type",
    "DIMENSION": "dimension",
    "NUMBER OF ITEMS": "n_items",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "rent",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
}


def parse_ttp(path) -> TtpData:
    path = str(path)
    header: dict[str, str] = {}
    coords: dict[int, tuple[float, float]] = {}
    items = []
    section = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line == "EOF":
                continue
            upper = line.upper()
            if upper.startswith("NODE_COORD_SECTION"):
                section = "nodes"
                continue
            if upper.startswith("ITEMS SECTION"):
                section = "items"
                continue
            if section is None:
                if ":" not in line:
                    raise ParseError(f"expected 'KEY: value', got {line!r}", lineno, path)
                key, value = (s.strip() for s in line.split(":", 1))
                key = key.upper()
                if key in _HEADER_KEYS:
                    header[_HEADER_KEYS[key]] = value
                continue
            fields = line.split()
            try:
                if section == "nodes":
                    if len(fields) != 3:
                        raise ValueError("node line needs index, x, y")
                    coords[int(fields[0])] = (float(fields[1]), float(fields[2]))
                else:
                    if len(fields) != 4:
                        raise ValueError("item line needs index, profit, weight, node")
                    items.append((int(fields[0]), float(fields[1]), float(fields[2]), int(fields[3])))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, path) from exc
            if section == "items" and items[-1][3] == 1:
                raise ParseError("node 1 must be free of items", lineno, path)

    for key in ("dimension", "n_items", "capacity", "v_min", "v_max", "rent"):
        if key not in header:
            raise ParseError(f"missing header field {key}", None, path)
    try:
        dim = int(header["dimension"])
        n_items = int(header["n_items"])
        values = {k: float(header[k]) for k in ("capacity", "v_min", "v_max", "rent")}
    except ValueError as exc:
        raise ParseError(f"bad header value: {exc}", None, path) from exc
    if len(coords) != dim or set(coords) != set(range(1, dim + 1)):
        raise CountMismatch(f"DIMENSION {dim} but {len(coords)} node lines", None, path)
    if len(items) != n_items:
        raise CountMismatch(f"NUMBER OF ITEMS {n_items} but {len(items)} item lines", None, path)
    for idx, _, _, node in items:
        if not 2 <= node <= dim:
            raise ParseError(f"item {idx} assigned to node {node} outside 2..{dim}", None, path)
    return TtpData(
        name=header.get("name", Path(path).stem),
        dimension=dim,
        edge_weight_type=header.get("edge_weight_type", "CEIL_2D").upper(),
        coords=coords,
        items=tuple(items),
        **values,
    )


def distance(a: tuple[float, float], b: tuple[float, float], metric: str) -> float:
    raw = math.hypot(a[0] - b[0], a[1] - b[1])
    metric = metric.lower().replace("_", "")
    if metric == "ceil2d":
        return float(math.ceil(raw))
    if metric in ("euc2d", "nint"):
        return float(int(raw + 0.5))
    if metric == "euclid":
        return raw
    raise ValueError(f"unknown metric {metric!r}")


def parse_tour(path, dimension: int | None = None) -> list[int]:
    """Read a tour: whitespace/line separated node ids, optionally TSPLIB-framed."""
    text = Path(path).read_text()
    if "TOUR_SECTION" in text.upper():
        body = re.split(r"TOUR_SECTION", text, flags=re.IGNORECASE)[1]
    else:
        body = text
    tour = []
    for tok in body.split():
        if tok.upper() == "EOF" or tok == "-1":
            break
        try:
            tour.append(int(tok))
        except ValueError as exc:
            raise ParseError(f"bad tour token {tok!r}", None, str(path)) from exc
    if dimension is not None:
        check_permutation(tour, dimension)
    return tour


def check_permutation(tour: Sequence[int], dimension: int):
    if sorted(tour) != list(range(1, dimension + 1)):
        raise InvalidPermutation(f"tour is not a permutation of 1..{dimension}")


def apply_tour(raw: TtpData, tour: Sequence[int] | None = None, metric: str | None = None) -> Instance:
    """Route ``pi_2, ..., pi_n, pi_1``: start after the item-free node, end at it."""
    if tour is None:
        tour = list(range(1, raw.dimension + 1))
    check_permutation(tour, raw.dimension)
    metric = metric or raw.edge_weight_type
    if any(node == tour[0] for *_, node in raw.items):
        raise InvalidPermutation("the tour must start at a node without items")
    route = list(tour[1:]) + [tour[0]]
    city_of = {node: i for i, node in enumerate(route, start=1)}
    dists = [distance(raw.coords[a], raw.coords[b], metric) for a, b in zip(route, route[1:])]
    buckets: dict[int, list[tuple[int, float, float]]] = {}
    for idx, p, w, node in sorted(raw.items):
        buckets.setdefault(city_of[node], []).append((idx, p, w))
    items = [Item(city, slot, p, w)
             for city, bucket in sorted(buckets.items())
             for slot, (_, p, w) in enumerate(bucket, start=1)]
    return Instance(tuple(dists), tuple(items), raw.capacity, raw.v_min, raw.v_max, raw.rent, raw.name)


def load_instance(path, tour_path=None, metric: str | None = None) -> tuple[Instance, dict]:
    """Load a native JSON instance or a TTP file (with an optional tour)."""
    path = Path(path)
    head = path.read_text()[:4096].lstrip()
    if head.startswith("{"):
        return load_json_instance(path)
    raw = parse_ttp(path)
    tour = parse_tour(tour_path, raw.dimension) if tour_path else None
    return apply_tour(raw, tour, metric), {"tour": str(tour_path) if tour_path else "identity"}


# --- plans and solutions -------------------------------------------------------

def read_plan(spec: str, instance: Instance) -> PackingPlan:
    """A plan given inline as 0/1 bits, or a file holding bits or a JSON record with ``plan``."""
    text = spec
    p = Path(spec)
    if not set(spec) <= {"0", "1"} and p.exists():
        text = p.read_text().strip()
        if text.startswith("{"):
            text = json.loads(text)["plan"]
    plan = PackingPlan.from_bits(text) if text else PackingPlan.empty(instance)
    if len(plan) != instance.m:
        raise ParseError(f"plan has {len(plan)} bits, instance has {instance.m} items")
    return plan


def read_solution_values(path) -> dict[str, float]:
    """Variable values from a ``name value`` text file or a JSON object."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return {k: float(v) for k, v in json.loads(text).items()}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith(("#", "\\")):
            continue
        try:
            values[fields[0]] = float(fields[1])
        except (IndexError, ValueError) as exc:
            raise ParseError(f"expected 'name value', got {line!r}", lineno, str(path)) from exc
    return values


def plan_from_values(instance: Instance, report: PreprocessReport, values: dict[str, float]) -> PackingPlan:
    """Rebuild a full plan from solver values: compulsory items plus every ``x`` above 1/2."""
    chosen = set(report.compulsory)
    for k in report.remaining:
        e = instance.items[k]
        if values.get(f"x_{e.city}_{e.slot}", 0.0) > 0.5:
            chosen.add(k)
    return PackingPlan.from_indices(instance, chosen)


# --- CSV results ---------------------------------------------------------------

RESULT_COLUMNS = ["instance", "method", "m", "alpha", "ver", "t", "gap", "beta",
                  "objective", "proven_optimal", "nodes", "plan", "version"]


def write_results(rows: Iterable[dict], path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in RESULT_COLUMNS})


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
