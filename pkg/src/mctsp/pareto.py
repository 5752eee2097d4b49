"""Pareto fronts over weight vectors and the grid-based sparsification.

All comparisons are componentwise on exact integers, and the coverage factor
between fronts is an exact :class:`fractions.Fraction`.  Sets carry a ``kind``
tag (``"tour"``, ``"tree"``, ...) so fronts of different solution shapes can
never be compared by accident.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ParameterError, StructuralError
from .graph import WeightVector


@dataclass(frozen=True)
class ParetoItem:
    """One candidate solution: its weight vector plus optional provenance.

    ``solution`` is any object with a ``canonical_key()`` method (or None
    when only the vector matters); ``source`` records how the item was
    produced, e.g. the tree a tour was built from.
    """

    weight: WeightVector
    solution: object = None
    source: tuple = ()

    def sort_key(self) -> tuple:
        sol_key = self.solution.canonical_key() if self.solution is not None else ()
        return (tuple(self.weight), sol_key)


def dominates(a: WeightVector, b: WeightVector) -> bool:
    """True when ``a`` is componentwise <= ``b``.  Equal vectors dominate each other."""
    if len(a) != len(b):
        raise StructuralError(f"cannot compare vectors of length {len(a)} and {len(b)}")
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class ParetoSet:
    """An antichain of weighted solutions under componentwise dominance."""

    kind: str
    items: tuple[ParetoItem, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(sorted(self.items, key=ParetoItem.sort_key)))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def weights(self) -> list[WeightVector]:
        return [it.weight for it in self.items]


def filter_dominated(kind: str, items: Iterable[ParetoItem]) -> ParetoSet:
    """Keep one item per nondominated weight vector.

    Ties on the weight vector are broken by the solution's canonical key, so
    repeated runs always keep the same representative.
    """
    pool = sorted(items, key=ParetoItem.sort_key)
    best: dict[tuple, ParetoItem] = {}
    for it in pool:
        best.setdefault(tuple(it.weight), it)
    uniq = [best[w] for w in sorted(best)]
    keep = []
    for it in uniq:
        if any(
            dominates(other.weight, it.weight) and tuple(other.weight) != tuple(it.weight)
            for other in uniq
        ):
            continue
        keep.append(it)
    return ParetoSet(kind, tuple(keep))


@dataclass(frozen=True)
class CoverageFactor:
    """How well one front covers another: the smallest workable beta.

    ``beta=None`` means no finite factor exists (the candidate set left some
    reference point entirely uncovered, only possible when it is empty).
    """

    beta: Optional[Fraction]

    def at_most(self, bound: Fraction) -> bool:
        return self.beta is not None and self.beta <= bound

    def __str__(self) -> str:
        return "unbounded" if self.beta is None else str(self.beta)


def coverage_beta(candidate: ParetoSet, reference: ParetoSet) -> CoverageFactor:
    """Smallest beta such that ``candidate`` beta-covers every reference point.

    For each reference vector z the best candidate y minimizes the worst
    per-component ratio w_i(y) / w_i(z); the coverage factor is the maximum
    of those minima over z.  Exact rational arithmetic throughout.
    """
    if candidate.kind != reference.kind:
        raise StructuralError(
            f"cannot compare a {candidate.kind!r} front against a {reference.kind!r} front"
        )
    if not reference.items:
        return CoverageFactor(Fraction(1))
    if not candidate.items:
        return CoverageFactor(None)
    worst = Fraction(0)
    for z in reference.weights():
        best: Optional[Fraction] = None
        for y in candidate.weights():
            ratio = max(Fraction(y[i], z[i]) for i in range(len(z)))
            if best is None or ratio < best:
                best = ratio
        assert best is not None
        if best > worst:
            worst = best
    return CoverageFactor(worst)


def _grid_cell(w: int, num: int, den: int) -> int:
    """Largest c >= 0 with (num/den)^c <= w, via exact integer arithmetic."""
    if w < 1:
        raise StructuralError(f"grid placement needs positive weights, got {w}")
    c = 0
    p_num, p_den = num, den  # (num/den)^(c+1)
    while p_num <= w * p_den:
        c += 1
        p_num *= num
        p_den *= den
    return c


def grid_select(kind: str, items: Sequence[ParetoItem], eps: Fraction) -> ParetoSet:
    """Sparsify to one representative per multiplicative grid cell.

    Cells partition weight space at powers of (1 + eps) per coordinate.  In
    each nonempty cell the representative is the item whose sort key is
    smallest; the survivors then pass through dominance filtering.  The
    result beta-covers the full set with beta = 1 + eps.  ``eps = 0`` is
    allowed and reduces to plain dominance filtering.
    """
    if eps < 0:
        raise ParameterError(f"grid resolution eps must be >= 0, got {eps}")
    if eps == 0:
        return filter_dominated(kind, items)
    ratio = Fraction(1) + eps
    num, den = ratio.numerator, ratio.denominator
    cells: dict[tuple[int, ...], ParetoItem] = {}
    for it in sorted(items, key=ParetoItem.sort_key):
        cell = tuple(_grid_cell(w, num, den) for w in it.weight)
        cells.setdefault(cell, it)
    return filter_dominated(kind, cells.values())


def amplify(runs: Sequence[ParetoSet]) -> ParetoSet:
    """Union independent runs and refilter.

    With per-run success probability >= 1/2 per covered point, the union of
    l runs fails on a point with probability <= 2^-l.
    """
    if not runs:
        raise ParameterError("amplification needs at least one run")
    kind = runs[0].kind
    for r in runs[1:]:
        if r.kind != kind:
            raise StructuralError(f"cannot merge {r.kind!r} runs into {kind!r} runs")
    return filter_dominated(kind, (it for r in runs for it in r.items))
