"""Approximate Pareto curves of tours from three constructions.

Each algorithm maps a (1+eps')-approximate front of auxiliary structures
(spanning trees or cycle covers) to tours and filters the result:

* tree doubling: double each tree, Euler walk, shortcut;
* Christofides-style: tree plus a matching on its odd-degree vertices;
* cycle-cover patching: remove one edge per cycle, rejoin the paths.

All three return tour fronts whose coverage of the exact tour front is
bounded by a closed-form ratio; see ``analysis.ratio_bound`` for the forms
and their domains.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional

from .errors import CapExceededError, ParameterError, StructuralError
from .graph import (
    CycleCover,
    Instance,
    Tour,
    doubled,
    euler_circuit,
    norm_edge,
    odd_vertices,
    shortcut_walk,
    total_weight,
    union_multigraph,
)
from .pareto import ParetoItem, ParetoSet, amplify, filter_dominated
from .oracles import approx_oracle

REMOVAL_POLICIES = ("aggregate-heaviest", "canonical-first")
JOIN_ORDERS = ("canonical", "greedy-nearest-endpoint")


def tree_doubling(inst: Instance, eps: Fraction) -> ParetoSet:
    """Tour front from doubled spanning trees.

    Works on undirected instances; a declared gamma tightens the guarantee
    to min{1+gamma, 2*gamma^2/(2*gamma^2-2*gamma+1)} + eps, and without one
    the plain metric case gamma=1 (ratio 2+eps) applies.  Each output tour
    is checked against its source tree: per criterion the tour weighs at
    most (1+gamma) times the tree, which is the very inequality the
    guarantee rests on.
    """
    if inst.directed:
        raise ParameterError("undirected required: tree doubling has no directed analogue here")
    if eps <= 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    gamma = inst.gamma_declared if inst.gamma_declared is not None else Fraction(1)
    trees = approx_oracle("tree", inst, eps / 2)
    out = []
    for item in trees:
        tree = item.solution
        walk = euler_circuit(doubled(tree), start=0)
        tour = shortcut_walk(inst, walk)
        w = total_weight(inst, tour.edges())
        if inst.gamma_declared is not None:
            for i in range(inst.k):
                if w[i] > (1 + gamma) * item.weight[i]:
                    raise StructuralError(
                        f"shortcut tour exceeds (1+gamma) x tree weight on criterion {i}: "
                        f"{w[i]} > (1+{gamma}) * {item.weight[i]}"
                    )
        out.append(ParetoItem(w, tour, source=(("tree", tree.canonical_key()),)))
    return filter_dominated("tour", out)


MatchingOracle = Callable[[frozenset[int], Fraction], ParetoSet]


def christofides_multi(
    inst: Instance,
    eps: Fraction,
    *,
    matching_oracle: Optional[MatchingOracle] = None,
) -> ParetoSet:
    """Tour front from trees augmented by odd-vertex matchings.

    For every tree in a (1+eps/2)-approximate tree front, a (1+eps/2)
    matching front on the tree's odd-degree vertices is added; each
    tree/matching union is Eulerian, walked, and shortcut.  The guarantee
    is (2*gamma^3+2*gamma^2)/(3*gamma^2-2*gamma+1) + eps.

    ``matching_oracle`` swaps in a different matching subroutine.  When it
    advertises ``randomized = True`` it is called ceil(log2(2p)) times per
    tree (p = number of trees) and the runs are merged, which drives the
    per-tree failure probability below 1/(2p); the built-in enumeration
    backend never fails, so it is called once.
    """
    if inst.directed:
        raise ParameterError("undirected required: the matching step needs symmetric weights")
    if eps <= 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    trees = approx_oracle("tree", inst, eps / 2)
    p = len(trees)
    rounds = max(1, (2 * p - 1).bit_length()) if getattr(matching_oracle, "randomized", False) else 1
    out = []
    for item in trees:
        tree = item.solution
        odd = odd_vertices(tree)
        try:
            if matching_oracle is None:
                fronts = [approx_oracle("matching", inst, eps / 2, subset=odd)]
            else:
                fronts = [matching_oracle(odd, eps / 2) for _ in range(rounds)]
        except CapExceededError as exc:
            raise CapExceededError(
                f"matching on the {len(odd)} odd-degree vertices of tree "
                f"{tree.canonical_key()}: {exc}"
            ) from exc
        merged = amplify(fronts)
        for m_item in merged:
            matching = m_item.solution
            graph = union_multigraph(tree, matching)
            if any(d % 2 for d in graph.degrees()):
                raise StructuralError("tree plus odd-vertex matching left an odd degree")
            walk = euler_circuit(graph, start=0)
            tour = shortcut_walk(inst, walk)
            out.append(
                ParetoItem(
                    total_weight(inst, tour.edges()),
                    tour,
                    source=(
                        ("tree", tree.canonical_key()),
                        ("matching", matching.canonical_key()),
                    ),
                )
            )
    return filter_dominated("tour", out)


def cc_variant(inst: Instance, beta_cap: Optional[Fraction] = None) -> tuple[str, dict]:
    """Pick the patching guarantee a given instance falls under.

    Returns a ratio-model tag plus its parameters: weights in {1, 2} get
    the fixed 4/3 (undirected) or 3/2 (directed) bounds; undirected gamma
    metrics with gamma < 1 get the refined bound; directed gamma metrics
    with 3*gamma^2 < 1 get theirs; everything else falls back to the
    generic spread bound 1 + alpha*(beta - 1), which needs a finite weight
    spread beta.  Directed instances outside the gamma domain must supply
    ``beta_cap`` explicitly since no a-priori spread bound exists there.
    """
    alpha = Fraction(1, 2) if inst.directed else Fraction(1, 3)
    if inst.is_one_two:
        return ("cc_atsp12" if inst.directed else "cc_stsp12", {})
    gamma = inst.gamma_declared
    if not inst.directed:
        if gamma is not None and gamma < 1:
            return ("cc_stsp_refined", {"gamma": gamma})
        beta = _spread(inst, beta_cap)
        return ("cc_generic", {"alpha": alpha, "beta": beta})
    if gamma is not None and 3 * gamma * gamma < 1:
        return ("cc_atsp_gamma", {"gamma": gamma})
    if beta_cap is None:
        raise ParameterError(
            "directed patching without 3*gamma^2 < 1 has no a-priori weight-spread bound; "
            "pass beta_cap to use the generic 1 + (beta-1)/2 guarantee"
        )
    return ("cc_generic", {"alpha": alpha, "beta": _spread(inst, beta_cap)})


def _spread(inst: Instance, beta_cap: Optional[Fraction]) -> Fraction:
    actual = max(Fraction(inst.max_weight(i), inst.min_weight(i)) for i in range(inst.k))
    if beta_cap is None:
        return actual
    if actual > beta_cap:
        raise ParameterError(
            f"instance weight spread {actual} exceeds the declared beta_cap {beta_cap}"
        )
    return beta_cap


def cycle_cover_patch(
    inst: Instance,
    eps: Fraction,
    *,
    beta_cap: Optional[Fraction] = None,
    policy: str = "aggregate-heaviest",
    join: str = "canonical",
) -> ParetoSet:
    """Tour front by patching a (1+eps')-approximate cycle-cover front.

    eps' is eps divided by the eps-free guarantee of the applicable
    variant, which makes the end-to-end bound exactly (guarantee + eps).
    ``eps = 0`` requests the exact cover front; with {1,2} weights that
    keeps the headline bounds 4/3 and 3/2 sharp.
    """
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    from .analysis import RatioModel, ratio_bound  # local import, analysis imports us

    tag, params = cc_variant(inst, beta_cap)
    base = ratio_bound(RatioModel(variant=tag, eps=Fraction(0), **params))
    covers = approx_oracle("cycle_cover", inst, eps / base)
    out = []
    for item in covers:
        tour = patch_cover(inst, item.solution, policy, join=join)
        out.append(
            ParetoItem(
                total_weight(inst, tour.edges()),
                tour,
                source=(("cover", item.solution.canonical_key()),),
            )
        )
    return filter_dominated("tour", out)


def patch_cover(
    inst: Instance,
    cover: CycleCover,
    policy: str = "aggregate-heaviest",
    join: str = "canonical",
) -> Tour:
    """Merge a cycle cover into one Hamiltonian cycle.

    One edge is removed from every cycle (none when the cover is already a
    single cycle) and the resulting paths are chained end to start.  The
    removal ``policy`` picks which edge goes:

    * ``aggregate-heaviest``: the edge maximizing the sum over criteria of
      weight relative to the instance-wide minimum, ties to the smallest
      endpoint pair; removing heavy edges can only help a bound that
      credits each removal with at least the minimum weight.
    * ``canonical-first``: the lexicographically first edge.

    ``join`` orders the paths: ``canonical`` keeps the cover's cycle order
    (sorted by smallest contained vertex); ``greedy-nearest-endpoint``
    repeatedly appends the path whose head is cheapest to reach.
    """
    if policy not in REMOVAL_POLICIES:
        raise ParameterError(f"unknown removal policy {policy!r}, expected {REMOVAL_POLICIES}")
    if join not in JOIN_ORDERS:
        raise ParameterError(f"unknown join order {join!r}, expected {JOIN_ORDERS}")
    if cover.n != inst.n or cover.directed != inst.directed:
        raise StructuralError("cycle cover does not belong to this instance")
    if len(cover.cycles) == 1:
        return Tour(cover.cycles[0], inst.directed)
    limit = cover.n // (2 if inst.directed else 3)
    if len(cover.cycles) > limit:
        raise StructuralError(
            f"{len(cover.cycles)} cycles on {cover.n} vertices breaks the removal budget {limit}"
        )
    mins = [inst.min_weight(i) for i in range(inst.k)]
    paths = []
    for cyc in cover.cycles:
        arcs = list(zip(cyc, cyc[1:] + cyc[:1]))
        idx = _removal_index(inst, arcs, mins, policy)
        a, b = arcs[idx]
        pos = cyc.index(b)
        path = cyc[pos:] + cyc[:pos]  # runs b .. a
        if not inst.directed and path[0] > path[-1]:
            path = tuple(reversed(path))
        paths.append(path)
    if join == "canonical":
        ordered = paths
    else:
        ordered = _greedy_order(inst, paths, mins)
    order = tuple(v for path in ordered for v in path)
    return Tour(order, inst.directed)


def _removal_index(inst, arcs, mins, policy: str) -> int:
    if policy == "canonical-first":
        keyed = [
            (arc if inst.directed else norm_edge(*arc), i) for i, arc in enumerate(arcs)
        ]
        return min(keyed)[1]
    best_i = 0
    best_score = None
    for i, (u, v) in enumerate(arcs):
        w = inst.weight(u, v)
        score = sum(Fraction(w[j], mins[j]) for j in range(inst.k))
        tie = (u, v) if inst.directed else norm_edge(u, v)
        if best_score is None or score > best_score[0] or (score == best_score[0] and tie < best_score[1]):
            best_score = (score, tie)
            best_i = i
    return best_i


def _greedy_order(inst, paths, mins):
    remaining = list(paths[1:])
    chain = [paths[0]]
    tail = paths[0][-1]
    while remaining:
        best = None
        for i, p in enumerate(remaining):
            variants = [p] if inst.directed else [p, tuple(reversed(p))]
            for q in variants:
                w = inst.weight(tail, q[0])
                cost = sum(Fraction(w[j], mins[j]) for j in range(inst.k))
                cand = (cost, q[0], i, q)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        _, _, i, q = best
        chain.append(q)
        tail = q[-1]
        del remaining[i]
    return chain
