"""Exhaustive Pareto oracles for tours, trees, matchings and cycle covers.

These enumerate the full solution space, so they are the ground truth that
the approximation algorithms are benchmarked against.  Hard caps keep the
blowup in check; ``MCTSP_ORACLE_CAP`` overrides every cap with one integer.

``approx_oracle`` wraps the exact fronts with grid sparsification and is the
stand-in for the polynomial (1+eps) Pareto-curve subroutines the tour
algorithms are built on.  Its contract is the randomized one (success
probability >= 1 - 1/(2p) after amplification); this backend happens to be
deterministic, which callers may not rely on.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import CapExceededError, MalformedInputError, ParameterError, StructuralError
from .graph import (
    CycleCover,
    Edge,
    Instance,
    Matching,
    SpanningTree,
    Tour,
    WeightVector,
    norm_edge,
)
from .pareto import ParetoItem, ParetoSet, filter_dominated, grid_select

DEFAULT_CAPS = {
    "tour_undirected": 10,
    "tour_directed": 9,
    "tree": 8,
    "matching": 12,
    "cycle_cover": 8,
}

_CAP_ENV = "MCTSP_ORACLE_CAP"


def _cap(name: str) -> int:
    raw = os.environ.get(_CAP_ENV)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise ParameterError(f"{_CAP_ENV} must be an integer, got {raw!r}") from None
    return DEFAULT_CAPS[name]


def _check_cap(name: str, size: int, what: str) -> None:
    cap = _cap(name)
    if size > cap:
        raise CapExceededError(
            f"{what} enumeration capped at {cap}, got {size} "
            f"(set {_CAP_ENV} to raise the cap)"
        )


def _best_reps(pool: dict) -> list:
    """Values of ``pool`` in key order; pool maps weight tuple -> candidate."""
    return [pool[w] for w in sorted(pool)]


@lru_cache(maxsize=None)
def oracle_tours(inst: Instance) -> ParetoSet:
    """Exact Pareto front over all Hamiltonian cycles.

    Enumerates (n-1)! vertex orders with vertex 0 fixed; undirected
    instances skip reversed duplicates.  Per weight vector the tour with
    the smallest canonical edge list is kept.
    """
    _check_cap("tour_directed" if inst.directed else "tour_undirected", inst.n, "tour")
    n, k = inst.n, inst.k
    mats = [inst.weight_matrix(i) for i in range(k)]
    best: dict[tuple[int, ...], tuple[tuple, tuple[int, ...]]] = {}
    for perm in permutations(range(1, n)):
        if not inst.directed and perm[0] > perm[-1]:
            continue
        order = (0,) + perm
        w = tuple(
            sum(m[order[j]][order[(j + 1) % n]] for j in range(n)) for m in mats
        )
        if inst.directed:
            key = tuple(sorted((order[j], order[(j + 1) % n]) for j in range(n)))
        else:
            key = tuple(sorted(norm_edge(order[j], order[(j + 1) % n]) for j in range(n)))
        cur = best.get(w)
        if cur is None or key < cur[0]:
            best[w] = (key, order)
    items = [
        ParetoItem(WeightVector(w), Tour(order, inst.directed))
        for w, (_, order) in sorted(best.items())
    ]
    return filter_dominated("tour", items)


@lru_cache(maxsize=None)
def oracle_spanning_trees(inst: Instance) -> ParetoSet:
    """Exact Pareto front over all n^(n-2) spanning trees.

    Decodes every sequence over 0..n-1 of length n-2 into its tree, all
    sequences at once as numpy arrays; the sequence/tree bijection makes
    the sweep exhaustive without duplicates.  Representative choice per
    weight vector is the lexicographically smallest sorted edge list.
    """
    if inst.directed:
        raise ParameterError("spanning tree enumeration needs an undirected instance")
    _check_cap("tree", inst.n, "spanning tree")
    n, k = inst.n, inst.k
    grids = np.meshgrid(*([np.arange(n, dtype=np.int64)] * (n - 2)), indexing="ij")
    seqs = np.stack([g.ravel() for g in grids], axis=1)
    t = seqs.shape[0]
    rows = np.arange(t)
    deg = np.ones((t, n), dtype=np.int64)
    for j in range(n - 2):
        np.add.at(deg, (rows, seqs[:, j]), 1)

    eu = np.empty((t, n - 1), dtype=np.int64)
    ev = np.empty((t, n - 1), dtype=np.int64)
    for j in range(n - 2):
        leaf = np.argmax(deg == 1, axis=1)  # smallest current leaf per row
        s = seqs[:, j]
        eu[:, j] = leaf
        ev[:, j] = s
        deg[rows, leaf] -= 1
        deg[rows, s] -= 1
    ones = deg == 1
    first = np.argmax(ones, axis=1)
    ones[rows, first] = False
    second = np.argmax(ones, axis=1)
    eu[:, n - 2] = first
    ev[:, n - 2] = second

    lo = np.minimum(eu, ev)
    hi = np.maximum(eu, ev)
    codes = lo * n + hi
    codes_sorted = np.sort(codes, axis=1)
    weights = np.empty((t, k), dtype=np.int64)
    for i in range(k):
        flat = np.asarray(inst.weight_matrix(i), dtype=np.int64).ravel()
        weights[:, i] = flat[codes].sum(axis=1)

    keys = [codes_sorted[:, j] for j in range(n - 2, -1, -1)]
    keys += [weights[:, i] for i in range(k - 1, -1, -1)]
    order = np.lexsort(keys)
    ws = weights[order]
    new_row = np.ones(t, dtype=bool)
    new_row[1:] = np.any(ws[1:] != ws[:-1], axis=1)
    uniq_rows = order[new_row]
    uniq_w = ws[new_row]

    front_rows = _front_rows(uniq_w, uniq_rows)
    items = []
    for w, r in front_rows:
        edges = frozenset((int(lo[r, j]), int(hi[r, j])) for j in range(n - 1))
        items.append(ParetoItem(WeightVector(int(x) for x in w), SpanningTree(n, edges)))
    return ParetoSet("tree", tuple(items))


def _front_rows(uniq_w: np.ndarray, uniq_rows: np.ndarray) -> list[tuple[np.ndarray, int]]:
    """Nondominated rows of a lex-sorted array of distinct weight vectors.

    Lex order guarantees any dominator precedes its victim, so each row only
    needs checking against rows already kept.
    """
    k = uniq_w.shape[1]
    if k == 2:
        out = []
        best = None
        for w, r in zip(uniq_w, uniq_rows):
            if best is None or w[1] < best:
                out.append((w, int(r)))
                best = w[1]
        return out
    out = []
    for w, r in zip(uniq_w, uniq_rows):
        if not any(all(kw[i] <= w[i] for i in range(k)) for kw, _ in out):
            out.append((w, int(r)))
    return out


@lru_cache(maxsize=None)
def oracle_matchings(inst: Instance, subset: frozenset[int]) -> ParetoSet:
    """Exact Pareto front over perfect matchings of the induced subgraph."""
    if inst.directed:
        raise ParameterError("matching enumeration needs an undirected instance")
    verts = sorted(subset)
    if len(verts) % 2 == 1:
        raise StructuralError(f"perfect matchings need an even vertex set, got {len(verts)}")
    for v in verts:
        if not (0 <= v < inst.n):
            raise MalformedInputError(f"subset vertex {v} outside 0..{inst.n - 1}")
    _check_cap("matching", len(verts), "perfect matching")
    if not verts:
        return ParetoSet("matching", (ParetoItem(WeightVector.zero(inst.k), Matching(frozenset())),))
    mats = [inst.weight_matrix(i) for i in range(inst.k)]
    k = inst.k
    best: dict[tuple[int, ...], tuple[tuple, tuple[Edge, ...]]] = {}

    def rec(rem: tuple[int, ...], acc: list[Edge], w: list[int]) -> None:
        if not rem:
            wt = tuple(w)
            key = tuple(sorted(acc))
            cur = best.get(wt)
            if cur is None or key < cur[0]:
                best[wt] = (key, tuple(acc))
            return
        u = rem[0]
        for idx in range(1, len(rem)):
            v = rem[idx]
            acc.append((u, v))
            for i in range(k):
                w[i] += mats[i][u][v]
            rec(rem[1:idx] + rem[idx + 1 :], acc, w)
            acc.pop()
            for i in range(k):
                w[i] -= mats[i][u][v]

    rec(tuple(verts), [], [0] * k)
    items = [
        ParetoItem(WeightVector(w), Matching(frozenset(edges)))
        for w, (_, edges) in sorted(best.items())
    ]
    return filter_dominated("matching", items)


@lru_cache(maxsize=None)
def oracle_cycle_covers(inst: Instance) -> ParetoSet:
    """Exact Pareto front over cycle covers.

    Directed: every permutation without fixed points, grouped into its
    cycles.  Undirected: backtracking over degree-2 edge sets; building the
    two edges at each vertex in ascending partner order visits every
    2-factor exactly once, and simple-graph edges force cycle length >= 3.
    """
    _check_cap("cycle_cover", inst.n, "cycle cover")
    n, k = inst.n, inst.k
    mats = [inst.weight_matrix(i) for i in range(k)]
    best: dict[tuple[int, ...], tuple[tuple, tuple]] = {}

    if inst.directed:
        for perm in permutations(range(n)):
            if any(perm[v] == v for v in range(n)):
                continue
            w = tuple(sum(m[v][perm[v]] for v in range(n)) for m in mats)
            key = tuple((v, perm[v]) for v in range(n))
            cur = best.get(w)
            if cur is None or key < cur[0]:
                best[w] = (key, perm)
        items = []
        for w, (_, perm) in sorted(best.items()):
            items.append(
                ParetoItem(WeightVector(w), CycleCover(n, _perm_cycles(perm), directed=True))
            )
        return filter_dominated("cycle_cover", items)

    partners: list[list[int]] = [[] for _ in range(n)]
    w_acc = [0] * k

    def rec() -> None:
        u = next((v for v in range(n) if len(partners[v]) < 2), None)
        if u is None:
            w = tuple(w_acc)
            key = tuple(sorted((min(v, p), max(v, p)) for v in range(n) for p in partners[v] if v < p))
            cur = best.get(w)
            if cur is None or key < cur[0]:
                best[w] = (key, tuple(tuple(p) for p in partners))
            return
        lo = u
        if len(partners[u]) == 1 and partners[u][0] > u:
            lo = partners[u][0]
        for v in range(lo + 1, n):
            if len(partners[v]) >= 2 or v in partners[u]:
                continue
            partners[u].append(v)
            partners[v].append(u)
            for i in range(k):
                w_acc[i] += mats[i][u][v]
            rec()
            partners[u].pop()
            partners[v].pop()
            for i in range(k):
                w_acc[i] -= mats[i][u][v]

    rec()
    items = []
    for w, (_, adj) in sorted(best.items()):
        items.append(
            ParetoItem(WeightVector(w), CycleCover(n, _adj_cycles(adj), directed=False))
        )
    return filter_dominated("cycle_cover", items)


def _perm_cycles(perm: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        v = start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = perm[v]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def _adj_cycles(adj: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    n = len(adj)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        prev, v = start, min(adj[start])
        while v != start:
            seen[v] = True
            cyc.append(v)
            a, b = adj[v]
            prev, v = v, (b if a == prev else a)
        cycles.append(tuple(cyc))
    return tuple(cycles)


# -- f-factors via the matching gadget --------------------------------------


@dataclass(frozen=True)
class FFactorSpec:
    """Target degrees over an allowed edge set of an undirected instance."""

    inst: Instance
    allowed: frozenset[Edge]
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.inst.directed:
            raise ParameterError("f-factors are defined here for undirected instances only")
        allowed = frozenset(norm_edge(u, v) for u, v in self.allowed)
        object.__setattr__(self, "allowed", allowed)
        if len(self.targets) != self.inst.n:
            raise ParameterError(f"need one target degree per vertex, got {len(self.targets)}")
        deg = [0] * self.inst.n
        for u, v in allowed:
            self.inst.weight(u, v)  # validates the pair
            deg[u] += 1
            deg[v] += 1
        for v, f in enumerate(self.targets):
            if f < 0:
                raise ParameterError(f"target degree of vertex {v} is negative")
            if f > deg[v]:
                raise ParameterError(
                    f"vertex {v} has only {deg[v]} allowed edges but target degree {f}"
                )
        if sum(self.targets) % 2 == 1:
            raise ParameterError("target degrees must sum to an even number")

    def degree(self, v: int) -> int:
        return sum(1 for e in self.allowed if v in e)


@dataclass(frozen=True)
class GadgetGraph:
    """Matching gadget whose perfect matchings are exactly the f-factors.

    Per original vertex v with incident allowed edges e_1..e_d there are d
    external vertices ("ext", v, e_j) and d - f(v) internal vertices
    ("int", v, j).  Internals connect to all externals of the same v with
    zero-weight edges; each allowed edge {u, v} becomes the external pair
    (("ext", u, e), ("ext", v, e)) carrying the original weight vector.
    A perfect matching saturates each internal through a zero edge, leaving
    exactly f(v) externals per vertex matched across, i.e. an f-factor of
    equal weight.
    """

    vertices: tuple
    edges: tuple[tuple, ...]
    weights: tuple[WeightVector, ...]
    origins: tuple[Optional[Edge], ...]

    def origin_of(self, idx: int) -> Optional[Edge]:
        return self.origins[idx]


def tutte_reduce(spec: FFactorSpec) -> GadgetGraph:
    """Build the matching gadget for an f-factor problem."""
    inst = spec.inst
    k = inst.k
    zero = WeightVector.zero(k)
    incident: dict[int, list[Edge]] = {v: [] for v in range(inst.n)}
    for e in sorted(spec.allowed):
        u, v = e
        incident[u].append(e)
        incident[v].append(e)
    vertices: list = []
    edges: list[tuple] = []
    weights: list[WeightVector] = []
    origins: list[Optional[Edge]] = []
    for v in range(inst.n):
        ext = [("ext", v, e) for e in incident[v]]
        spare = len(incident[v]) - spec.targets[v]
        internal = [("int", v, j) for j in range(spare)]
        vertices.extend(ext)
        vertices.extend(internal)
        for iv in internal:
            for xv in ext:
                edges.append((iv, xv))
                weights.append(zero)
                origins.append(None)
    for e in sorted(spec.allowed):
        u, v = e
        edges.append((("ext", u, e), ("ext", v, e)))
        weights.append(inst.weight(u, v))
        origins.append(e)
    return GadgetGraph(tuple(vertices), tuple(edges), tuple(weights), tuple(origins))


@dataclass(frozen=True)
class EdgeSubset:
    """Plain edge set with a canonical key, the shape of a projected f-factor."""

    edges: frozenset[Edge]

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges))


def gadget_matching_front(gadget: GadgetGraph) -> ParetoSet:
    """Pareto front of f-factors obtained from gadget perfect matchings.

    Enumerates perfect matchings of the (sparse) gadget by always matching
    the first unsaturated vertex, then projects each matching through the
    edge origins.  Many matchings project to the same f-factor (internal
    vertices permute); projection collapses them before filtering.
    """
    if len(gadget.vertices) > 40:
        raise CapExceededError(
            f"gadget matching enumeration capped at 40 vertices, got {len(gadget.vertices)}"
        )
    if len(gadget.vertices) % 2 == 1:
        raise StructuralError("gadget has an odd number of vertices, no perfect matching")
    index = {v: i for i, v in enumerate(gadget.vertices)}
    adj: list[list[tuple[int, int]]] = [[] for _ in gadget.vertices]
    for eid, (a, b) in enumerate(gadget.edges):
        ia, ib = index[a], index[b]
        adj[ia].append((ib, eid))
        adj[ib].append((ia, eid))
    total = len(gadget.vertices)
    matched = [False] * total
    seen: set[frozenset[Edge]] = set()
    found: list[frozenset[Edge]] = []
    chosen: list[int] = []

    def rec(done: int) -> None:
        if done == total:
            proj = frozenset(
                e for eid in chosen if (e := gadget.origin_of(eid)) is not None
            )
            if proj not in seen:
                seen.add(proj)
                found.append(proj)
            return
        u = matched.index(False)
        matched[u] = True
        for v, eid in adj[u]:
            if not matched[v]:
                matched[v] = True
                chosen.append(eid)
                rec(done + 2)
                chosen.pop()
                matched[v] = False
        matched[u] = False

    rec(0)
    inst_k = len(gadget.weights[0]) if gadget.weights else 1
    by_origin = {
        origin: gadget.weights[eid]
        for eid, origin in enumerate(gadget.origins)
        if origin is not None
    }
    items = []
    for proj in found:
        w = WeightVector.zero(inst_k)
        for e in proj:
            w = w + by_origin[e]
        items.append(ParetoItem(w, EdgeSubset(proj)))
    return filter_dominated("f_factor", items)


# -- approximate-subroutine facade -------------------------------------------

ORACLE_KINDS = ("tree", "matching", "cycle_cover")


def approx_oracle(
    kind: str,
    inst: Instance,
    eps: Fraction,
    subset: Optional[frozenset[int]] = None,
) -> ParetoSet:
    """(1+eps)-approximate Pareto curve for a subroutine solution family.

    Backed by the exact enumerators plus grid sparsification, so the
    (1+eps) coverage contract holds with certainty here.  ``eps = 0``
    returns the exact front (useful when weights are already tiny).
    """
    if kind not in ORACLE_KINDS:
        raise ParameterError(f"unknown oracle kind {kind!r}, expected one of {ORACLE_KINDS}")
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    if kind == "tree":
        base = oracle_spanning_trees(inst)
    elif kind == "matching":
        if subset is None:
            raise ParameterError("matching oracle needs the vertex subset to match on")
        base = oracle_matchings(inst, frozenset(subset))
    else:
        base = oracle_cycle_covers(inst)
    return grid_select(base.kind, base.items, eps)
