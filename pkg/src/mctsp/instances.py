"""Instance generation, gamma diagnostics, and JSON serialization.

Generators are fully deterministic given a seed.  Weights are integers so
that every downstream quantity (tour weights, coverage factors, ratio
bounds) stays exact.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import MalformedInputError, ParameterError, SchemaError
from .graph import Instance, WeightVector

VARIANTS = (
    "gamma_metric_undirected",
    "gamma_metric_directed",
    "one_two_undirected",
    "one_two_directed",
    "metric_closure",
)


@dataclass(frozen=True)
class GenSpec:
    """Parameters for one random instance.

    ``gamma`` is required for the gamma_metric variants and ignored
    otherwise.  ``scale`` is the minimum weight M for gamma_metric (weights
    are drawn from [M, 2*gamma*M]) and the base range for metric_closure.
    ``one_fraction`` is the probability of weight 1 in the (1,2) variants.
    """

    n: int
    k: int
    variant: str
    seed: int
    gamma: Optional[Fraction] = None
    scale: int = 20
    one_fraction: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.n < 3:
            raise ParameterError(f"need n >= 3, got {self.n}")
        if self.k < 1:
            raise ParameterError(f"need k >= 1, got {self.k}")
        if self.scale < 1:
            raise ParameterError(f"need scale >= 1, got {self.scale}")
        if not (0 <= self.one_fraction <= 1):
            raise ParameterError(f"one_fraction must lie in [0, 1], got {self.one_fraction}")
        if self.variant.startswith("gamma_metric"):
            if self.gamma is None:
                raise ParameterError(f"variant {self.variant!r} requires gamma")
            if not (Fraction(1, 2) <= self.gamma <= 1):
                raise ParameterError(f"gamma must lie in [1/2, 1], got {self.gamma}")

    @property
    def directed(self) -> bool:
        return self.variant in ("gamma_metric_directed", "one_two_directed")


def generate(spec: GenSpec) -> Instance:
    """Draw a random instance of the requested variant.

    gamma_metric: independent uniform integers in [M, floor(2*gamma*M)].
    Any two weights a, b from that range satisfy a <= gamma * 2M <= gamma
    * (b + c), so the strengthened triangle inequality holds by range
    alone.  When floor(2*gamma*M) == M (always at gamma = 1/2) all weights
    collapse to M, matching the fact that gamma = 1/2 forces uniformity.

    one_two: each weight is 1 with probability ``one_fraction``, else 2.

    metric_closure: uniform integers in [M, 3M], then shortest-path
    closure per criterion; the result is a plain metric (gamma = 1).
    """
    rng = random.Random(spec.seed)
    n, k = spec.n, spec.k
    if spec.variant.startswith("gamma_metric"):
        assert spec.gamma is not None
        lo = spec.scale
        hi = int(2 * spec.gamma * spec.scale)  # floor
        mats = [_draw_matrix(rng, n, lo, hi, spec.directed) for _ in range(k)]
        declared: Optional[Fraction] = spec.gamma
    elif spec.variant.startswith("one_two"):
        p, q = spec.one_fraction.numerator, spec.one_fraction.denominator
        mats = []
        for _ in range(k):
            m = [[0] * n for _ in range(n)]
            for u in range(n):
                rng_v = range(n) if spec.directed else range(u + 1, n)
                for v in rng_v:
                    if v == u:
                        continue
                    w = 1 if rng.randrange(q) < p else 2
                    m[u][v] = w
                    if not spec.directed:
                        m[v][u] = w
            mats.append(m)
        declared = Fraction(1)
    else:  # metric_closure
        mats = []
        for _ in range(k):
            m = _draw_matrix(rng, n, spec.scale, 3 * spec.scale, directed=False)
            _floyd_warshall(m)
            mats.append(m)
        declared = Fraction(1)
    rows = tuple(
        tuple(
            None if u == v else WeightVector(mats[i][u][v] for i in range(k))
            for v in range(n)
        )
        for u in range(n)
    )
    return Instance(n=n, k=k, directed=spec.directed, rows=rows, gamma_declared=declared)


def _draw_matrix(rng: random.Random, n: int, lo: int, hi: int, directed: bool) -> list[list[int]]:
    if hi < lo:
        hi = lo
    m = [[0] * n for _ in range(n)]
    for u in range(n):
        rng_v = range(n) if directed else range(u + 1, n)
        for v in rng_v:
            if v == u:
                continue
            w = rng.randint(lo, hi)
            m[u][v] = w
            if not directed:
                m[v][u] = w
    return m


def _floyd_warshall(m: list[list[int]]) -> None:
    n = len(m)
    for x in range(n):
        for u in range(n):
            mux = m[u][x]
            for v in range(n):
                d = mux + m[x][v]
                if u != v and d < m[u][v]:
                    m[u][v] = d


# -- gamma diagnostics -----------------------------------------------------


def validate_gamma(inst: Instance, gamma: Fraction) -> None:
    """Raise if any triple violates w(u,v) <= gamma * (w(u,x) + w(x,v))."""
    if not (Fraction(1, 2) <= gamma <= 1):
        raise ParameterError(f"gamma must lie in [1/2, 1], got {gamma}")
    bad = inst.gamma_violation(gamma)
    if bad is not None:
        i, u, x, v, lhs, rhs = bad
        raise ParameterError(
            f"gamma={gamma} violated on criterion {i} by triple ({u}, {x}, {v}): "
            f"{lhs} > {gamma} * {rhs}"
        )


def infer_gamma(inst: Instance) -> Fraction:
    """Smallest gamma the instance satisfies, clamped below at 1/2.

    Computed as the maximum of w(u,v) / (w(u,x) + w(x,v)) over all triples
    and criteria.  A value above 1 means the triangle inequality itself
    fails; the offending triple is named in the error.
    """
    best = Fraction(1, 2)
    worst_triple = None
    n = inst.n
    for i in range(inst.k):
        m = inst.weight_matrix(i)
        for u in range(n):
            for v in range(n):
                if u == v or (not inst.directed and v < u):
                    continue
                for x in range(n):
                    if x == u or x == v:
                        continue
                    r = Fraction(m[u][v], m[u][x] + m[x][v])
                    if r > best:
                        best = r
                        worst_triple = (i, u, x, v)
    if best > 1:
        i, u, x, v = worst_triple  # type: ignore[misc]
        raise ParameterError(
            f"triangle inequality fails on criterion {i} at triple ({u}, {x}, {v}): "
            f"ratio {best} > 1"
        )
    return best


def check_weight_ratio_bounds(inst: Instance, gamma: Fraction) -> dict:
    """Verify the weight-spread consequences of a gamma metric.

    For gamma < 1 every criterion must satisfy w_max / w_min <=
    2*gamma^2 / (1 - gamma), and any two edges sharing an endpoint must
    satisfy w(e) / w(e') <= gamma / (1 - gamma).  Directed instances with
    3*gamma^2 < 1 get the tighter global bound 2*gamma^3 / (1 - 3*gamma^2).
    Returns a report dict; violations are listed, not raised, so callers
    can decide how to react.
    """
    report: dict = {"gamma": str(gamma), "checked": [], "violations": []}
    if gamma >= 1:
        report["checked"].append("none (bounds are vacuous at gamma = 1)")
        return report
    spread_cap = 2 * gamma**2 / (1 - gamma)
    adj_cap = gamma / (1 - gamma)
    directed_cap = None
    if inst.directed and 3 * gamma**2 < 1:
        directed_cap = 2 * gamma**3 / (1 - 3 * gamma**2)
    report["checked"].append(f"global spread <= {spread_cap}")
    report["checked"].append(f"adjacent-edge ratio <= {adj_cap}")
    if directed_cap is not None:
        report["checked"].append(f"directed global spread <= {directed_cap}")
    for i in range(inst.k):
        wmin, wmax = inst.min_weight(i), inst.max_weight(i)
        if Fraction(wmax, wmin) > spread_cap:
            report["violations"].append(
                f"criterion {i}: spread {wmax}/{wmin} exceeds {spread_cap}"
            )
        if directed_cap is not None and Fraction(wmax, wmin) > directed_cap:
            report["violations"].append(
                f"criterion {i}: spread {wmax}/{wmin} exceeds directed cap {directed_cap}"
            )
        m = inst.weight_matrix(i)
        for u in range(inst.n):
            inc = []
            for v in range(inst.n):
                if v == u:
                    continue
                inc.append(m[u][v])
                if inst.directed:
                    inc.append(m[v][u])
            hi, lo = max(inc), min(inc)
            if Fraction(hi, lo) > adj_cap:
                report["violations"].append(
                    f"criterion {i}: edges at vertex {u} have ratio {hi}/{lo} > {adj_cap}"
                )
                break
    return report


# -- serialization ---------------------------------------------------------

SCHEMA_VERSION = 1


def instance_to_dict(inst: Instance) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "n": inst.n,
        "k": inst.k,
        "directed": inst.directed,
        "gamma": None if inst.gamma_declared is None else _frac_str(inst.gamma_declared),
        "weights": [inst.weight_matrix(i) for i in range(inst.k)],
    }


def instance_from_dict(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise SchemaError(f"instance document must be an object, got {type(data).__name__}")
    ver = data.get("version")
    if ver != SCHEMA_VERSION:
        raise SchemaError(f"version: expected {SCHEMA_VERSION}, got {ver!r}")
    n = _field(data, "n", int)
    k = _field(data, "k", int)
    directed = _field(data, "directed", bool)
    gamma_raw = data.get("gamma")
    gamma = None if gamma_raw is None else parse_fraction(gamma_raw, field="gamma")
    weights = data.get("weights")
    if not isinstance(weights, list) or len(weights) != k:
        raise SchemaError(f"weights: expected a list of {k} matrices")
    for i, mat in enumerate(weights):
        if not isinstance(mat, list) or len(mat) != n:
            raise SchemaError(f"weights[{i}]: expected {n} rows")
        for u, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != n:
                raise SchemaError(f"weights[{i}][{u}]: expected {n} entries")
            for v, w in enumerate(row):
                if not isinstance(w, int) or isinstance(w, bool):
                    raise SchemaError(f"weights[{i}][{u}][{v}]: expected an integer, got {w!r}")
                if u == v and w != 0:
                    raise SchemaError(f"weights[{i}][{u}][{v}]: diagonal must be 0, got {w}")
                if u != v and w < 1:
                    raise SchemaError(f"weights[{i}][{u}][{v}]: off-diagonal must be >= 1, got {w}")
                if not directed and weights[i][v][u] != w and v < u:
                    raise SchemaError(
                        f"weights[{i}][{u}][{v}]: undirected instance has asymmetric entry"
                    )
    rows = tuple(
        tuple(
            None if u == v else WeightVector(weights[i][u][v] for i in range(k))
            for v in range(n)
        )
        for u in range(n)
    )
    try:
        return Instance(n=n, k=k, directed=directed, rows=rows, gamma_declared=gamma)
    except (MalformedInputError, ParameterError) as exc:
        raise SchemaError(str(exc)) from exc


def write_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def instance_digest(inst: Instance) -> str:
    """Stable content hash used to tie solution files back to instances."""
    blob = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def parse_fraction(raw, field: str = "value") -> Fraction:
    """Parse 'p/q' or integer strings/numbers into an exact Fraction."""
    if isinstance(raw, int) and not isinstance(raw, bool):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{field}: cannot parse {raw!r} as a rational") from exc
    raise SchemaError(f"{field}: expected a rational string like '7/10', got {raw!r}")


def _frac_str(f: Fraction) -> str:
    return str(f)


def _field(data: dict, name: str, typ: type):
    val = data.get(name)
    if not isinstance(val, typ) or (typ is int and isinstance(val, bool)):
        raise SchemaError(f"{name}: expected {typ.__name__}, got {val!r}")
    return val
