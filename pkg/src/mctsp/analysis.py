"""Closed-form ratio bounds, empirical validation runs, and curve data.

``ratio_bound`` owns every guarantee formula in one place, evaluated in
exact rational arithmetic on its declared domain.  ``run_experiment``
measures coverage of algorithm output against the exact tour oracle and
compares it to the matching bound; ``emit_curves`` tabulates the formulas
over a gamma grid for plotting and regression.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from .errors import CapExceededError, FormulaDomainError, ParameterError
from .graph import Instance
from .instances import GenSpec, generate, parse_fraction
from .oracles import oracle_tours
from .pareto import ParetoSet, coverage_beta
from . import algorithms

VARIANTS = (
    "tree_doubling",
    "christofides",
    "cc_generic",
    "cc_stsp_refined",
    "cc_atsp_gamma",
    "cc_stsp12",
    "cc_atsp12",
    "stsp_gamma_single",
    "atsp_gamma_single",
    "trivial_stsp",
    "trivial_atsp",
)


@dataclass(frozen=True)
class RatioModel:
    """A guarantee formula instance: variant tag plus its parameters.

    ``alpha``/``beta`` feed the generic patching bound, ``gamma`` the
    metric-strength bounds.  ``n`` is accepted for forward compatibility
    with size-dependent bounds; none of the closed forms here use it.
    """

    variant: str
    gamma: Optional[Fraction] = None
    eps: Fraction = Fraction(0)
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    n: Optional[int] = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown ratio variant {self.variant!r}")
        if self.eps < 0:
            raise ParameterError(f"eps must be >= 0, got {self.eps}")


def _need_gamma(model: RatioModel) -> Fraction:
    g = model.gamma
    if g is None:
        raise FormulaDomainError(f"{model.variant} needs gamma")
    if not (Fraction(1, 2) <= g <= 1):
        raise FormulaDomainError(f"{model.variant} is stated for gamma in [1/2, 1], got {g}")
    return g


def ratio_bound(model: RatioModel) -> Fraction:
    """Exact value of the selected guarantee formula.

    Raises ``FormulaDomainError`` outside a formula's domain: the refined
    undirected patching bound needs gamma < 1, the directed gamma bounds
    need 3*gamma^2 < 1, and the spread-based forms diverge at gamma = 1.
    """
    v = model.variant
    if v == "tree_doubling":
        g = _need_gamma(model)
        branch = Fraction(2 * g * g, 2 * g * g - 2 * g + 1)
        return min(1 + g, branch) + model.eps
    if v == "christofides":
        g = _need_gamma(model)
        return Fraction(2 * g**3 + 2 * g**2, 3 * g**2 - 2 * g + 1) + model.eps
    if v == "cc_generic":
        if model.alpha is None or model.beta is None:
            raise FormulaDomainError("cc_generic needs alpha and beta")
        if not (0 < model.alpha <= 1):
            raise FormulaDomainError(f"alpha must lie in (0, 1], got {model.alpha}")
        if model.beta < 1:
            raise FormulaDomainError(f"beta is a weight spread, must be >= 1, got {model.beta}")
        return 1 + model.alpha * (model.beta - 1) + model.eps
    if v == "cc_stsp_refined":
        g = _need_gamma(model)
        if g == 1:
            raise FormulaDomainError(
                "refined undirected patching bound holds for gamma in [1/2, 1); "
                "its denominator 1 + 3*gamma - 4*gamma^2 vanishes at gamma = 1"
            )
        return Fraction(1 + g, 1 + 3 * g - 4 * g**2) + model.eps
    if v == "cc_atsp_gamma":
        g = _need_gamma(model)
        if 3 * g * g >= 1:
            raise FormulaDomainError(
                "directed gamma patching bound needs 3*gamma^2 < 1 "
                "(the weight spread is unbounded otherwise)"
            )
        return Fraction(1, 2) + Fraction(g**3, 1 - 3 * g**2) + model.eps
    if v == "cc_stsp12":
        return Fraction(4, 3) + model.eps
    if v == "cc_atsp12":
        return Fraction(3, 2) + model.eps
    if v == "stsp_gamma_single":
        g = _need_gamma(model)
        first = Fraction(3 * g**2, 3 * g**2 - 2 * g + 1)
        if g == 1:
            return first + model.eps
        return min(first, Fraction(2 - g, 3 - 3 * g)) + model.eps
    if v == "atsp_gamma_single":
        g = _need_gamma(model)
        if g == 1:
            raise FormulaDomainError(
                "single-criterion directed forms diverge at gamma = 1"
            )
        return min(Fraction(1 + g, 2 - g - g**3), Fraction(g, 1 - g)) + model.eps
    if v == "trivial_stsp":
        g = _need_gamma(model)
        if g == 1:
            raise FormulaDomainError("weight-spread bound 2*gamma^2/(1-gamma) diverges at gamma = 1")
        return Fraction(2 * g**2, 1 - g) + model.eps
    if v == "trivial_atsp":
        g = _need_gamma(model)
        if 3 * g * g >= 1:
            raise FormulaDomainError("directed weight-spread bound needs 3*gamma^2 < 1")
        return Fraction(2 * g**3, 1 - 3 * g**2) + model.eps
    raise ParameterError(f"unknown ratio variant {v!r}")


def model_for_algorithm(
    inst: Instance,
    algorithm: str,
    eps: Fraction,
    beta_cap: Optional[Fraction] = None,
) -> RatioModel:
    """The RatioModel an algorithm run on this instance is accountable to."""
    if algorithm == "tree-doubling":
        g = inst.gamma_declared if inst.gamma_declared is not None else Fraction(1)
        return RatioModel(variant="tree_doubling", gamma=g, eps=eps)
    if algorithm == "christofides":
        g = inst.gamma_declared if inst.gamma_declared is not None else Fraction(1)
        return RatioModel(variant="christofides", gamma=g, eps=eps)
    if algorithm == "cycle-cover":
        tag, params = algorithms.cc_variant(inst, beta_cap)
        return RatioModel(variant=tag, eps=eps, **params)
    raise ParameterError(f"unknown algorithm {algorithm!r}")


def run_algorithm(inst: Instance, algorithm: str, eps: Fraction, **kwargs) -> ParetoSet:
    if algorithm == "tree-doubling":
        return algorithms.tree_doubling(inst, eps)
    if algorithm == "christofides":
        return algorithms.christofides_multi(inst, eps)
    if algorithm == "cycle-cover":
        return algorithms.cycle_cover_patch(inst, eps, **kwargs)
    raise ParameterError(f"unknown algorithm {algorithm!r}")


@dataclass(frozen=True)
class RatioReport:
    """One experiment row: observed coverage vs the formula it must obey.

    ``wall_time_s`` is measured but deliberately left out of the JSON form,
    which must be byte-stable across reruns.
    """

    instance: dict
    algorithm: str
    variant: str
    empirical_beta: Optional[Fraction]
    bound: Optional[Fraction]
    passed: bool
    wall_time_s: float = field(compare=False, default=0.0)
    error: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "instance": self.instance,
            "algorithm": self.algorithm,
            "variant": self.variant,
            "empirical_beta": None if self.empirical_beta is None else str(self.empirical_beta),
            "bound": None if self.bound is None else str(self.bound),
            "passed": self.passed,
            "error": self.error,
        }


def _seed_list(raw) -> list[int]:
    if isinstance(raw, list):
        return [int(s) for s in raw]
    if isinstance(raw, dict) and set(raw) <= {"start", "count"}:
        start = int(raw.get("start", 0))
        return list(range(start, start + int(raw["count"])))
    raise ParameterError(f"seeds must be a list or {{start, count}}, got {raw!r}")


def run_experiment(config: dict) -> list[RatioReport]:
    """Run every (experiment, seed) cell in the config and report each row.

    Config shape::

        {"experiments": [{"variant": ..., "algorithm": ..., "n": ..., "k": ...,
                          "gamma": "7/10", "eps": "1/10", "seeds": [0, 1, ...],
                          "scale": 20, "one_fraction": "1/2", "beta_cap": "3"}]}

    Caps and parameter errors become failed rows with the message attached;
    the run always continues.  Rows come back sorted by (variant,
    algorithm, seed) regardless of config order.
    """
    rows: list[RatioReport] = []
    for exp in config.get("experiments", []):
        algorithm = exp["algorithm"]
        eps = parse_fraction(exp.get("eps", "0"), field="eps")
        gamma = None if exp.get("gamma") is None else parse_fraction(exp["gamma"], field="gamma")
        beta_cap = (
            None if exp.get("beta_cap") is None else parse_fraction(exp["beta_cap"], field="beta_cap")
        )
        kwargs = {}
        if exp.get("scale") is not None:
            kwargs["scale"] = int(exp["scale"])
        if exp.get("one_fraction") is not None:
            kwargs["one_fraction"] = parse_fraction(exp["one_fraction"], field="one_fraction")
        for seed in _seed_list(exp.get("seeds", [])):
            spec = GenSpec(
                n=int(exp["n"]),
                k=int(exp.get("k", 2)),
                variant=exp["variant"],
                seed=seed,
                gamma=gamma,
                **kwargs,
            )
            descriptor = {
                "variant": spec.variant,
                "n": spec.n,
                "k": spec.k,
                "gamma": None if spec.gamma is None else str(spec.gamma),
                "seed": seed,
                "scale": spec.scale,
                "one_fraction": str(spec.one_fraction),
            }
            start = time.perf_counter()
            try:
                inst = generate(spec)
                solve_kwargs = {"beta_cap": beta_cap} if algorithm == "cycle-cover" else {}
                front = run_algorithm(inst, algorithm, eps, **solve_kwargs)
                model = model_for_algorithm(inst, algorithm, eps, beta_cap)
                bound = ratio_bound(model)
                beta = coverage_beta(front, oracle_tours(inst)).beta
                rows.append(
                    RatioReport(
                        instance=descriptor,
                        algorithm=algorithm,
                        variant=model.variant,
                        empirical_beta=beta,
                        bound=bound,
                        passed=beta is not None and beta <= bound,
                        wall_time_s=time.perf_counter() - start,
                    )
                )
            except (CapExceededError, ParameterError, FormulaDomainError) as exc:
                rows.append(
                    RatioReport(
                        instance=descriptor,
                        algorithm=algorithm,
                        variant=exp.get("expect_variant", "error"),
                        empirical_beta=None,
                        bound=None,
                        passed=False,
                        wall_time_s=time.perf_counter() - start,
                        error=str(exc),
                    )
                )
    rows.sort(key=lambda r: (r.instance["variant"], r.algorithm, r.instance["seed"]))
    return rows


def write_reports(rows: Sequence[RatioReport], fh: TextIO) -> None:
    """JSON-lines serialization, one row per line, key-sorted for stability."""
    for row in rows:
        fh.write(json.dumps(row.to_json_dict(), sort_keys=True))
        fh.write("\n")


def summarize(rows: Sequence[RatioReport]) -> str:
    total = len(rows)
    passed = sum(1 for r in rows if r.passed)
    lines = [f"{passed}/{total} rows passed"]
    by_variant: dict[str, list[RatioReport]] = {}
    for r in rows:
        by_variant.setdefault(r.variant, []).append(r)
    for variant in sorted(by_variant):
        group = by_variant[variant]
        betas = [r.empirical_beta for r in group if r.empirical_beta is not None]
        worst = max(betas) if betas else None
        bound = next((r.bound for r in group if r.bound is not None), None)
        lines.append(
            f"  {variant}: {sum(1 for r in group if r.passed)}/{len(group)} passed, "
            f"max beta {worst if worst is not None else 'n/a'}"
            + (f" vs bound {bound}" if bound is not None else "")
        )
    errs = [r for r in rows if r.error]
    if errs:
        lines.append(f"  {len(errs)} rows errored; first: {errs[0].error}")
    return "\n".join(lines)


# -- curve tabulation --------------------------------------------------------

CURVE_SERIES = (
    "tree_doubling",
    "christofides",
    "cycle_cover_generic",
    "cycle_cover_refined",
    "atsp_gamma",
    "atsp_trivial",
    "single_stsp",
    "single_atsp",
)


def _series_value(series: str, gamma: Fraction) -> Optional[Fraction]:
    try:
        if series == "tree_doubling":
            return ratio_bound(RatioModel(variant="tree_doubling", gamma=gamma))
        if series == "christofides":
            return ratio_bound(RatioModel(variant="christofides", gamma=gamma))
        if series == "cycle_cover_generic":
            spread = ratio_bound(RatioModel(variant="trivial_stsp", gamma=gamma))
            return ratio_bound(
                RatioModel(variant="cc_generic", alpha=Fraction(1, 3), beta=spread)
            )
        if series == "cycle_cover_refined":
            return ratio_bound(RatioModel(variant="cc_stsp_refined", gamma=gamma))
        if series == "atsp_gamma":
            return ratio_bound(RatioModel(variant="cc_atsp_gamma", gamma=gamma))
        if series == "atsp_trivial":
            return ratio_bound(RatioModel(variant="trivial_atsp", gamma=gamma))
        if series == "single_stsp":
            return ratio_bound(RatioModel(variant="stsp_gamma_single", gamma=gamma))
        if series == "single_atsp":
            return ratio_bound(RatioModel(variant="atsp_gamma_single", gamma=gamma))
    except FormulaDomainError:
        return None
    raise ParameterError(f"unknown curve series {series!r}")


def format_ratio(value: Fraction, places: int = 6) -> str:
    """Fixed-point decimal rendering, exact until the final rounding."""
    scale = 10**places
    scaled = round(value * scale)
    return f"{scaled // scale}.{scaled % scale:0{places}d}"


def curve_rows(gamma_grid: Sequence[Fraction]) -> list[dict]:
    rows = []
    for g in gamma_grid:
        if not (Fraction(1, 2) <= g <= 1):
            raise ParameterError(f"curve grid points must lie in [1/2, 1], got {g}")
        row: dict = {"gamma": g}
        for series in CURVE_SERIES:
            row[series] = _series_value(series, g)
        rows.append(row)
    return rows


def emit_curves(gamma_grid: Sequence[Fraction], out: TextIO) -> list[dict]:
    """Write the guarantee curves as CSV; empty cell = outside the domain.

    Values are exact rationals rendered at 6 decimal places.  Returns the
    raw rows so callers can plot without reparsing.
    """
    rows = curve_rows(gamma_grid)
    out.write("gamma," + ",".join(CURVE_SERIES) + "\n")
    for row in rows:
        cells = [format_ratio(row["gamma"])]
        for series in CURVE_SERIES:
            val = row[series]
            cells.append("" if val is None else format_ratio(val))
        out.write(",".join(cells) + "\n")
    return rows
