"""Core graph representation and structural solution types.

Vertices are the integers ``0 .. n-1``.  An :class:`Instance` is a complete
graph (directed or undirected) carrying a vector of ``k`` positive integer
weights on every edge.  Solution types (:class:`Tour`, :class:`SpanningTree`,
:class:`Matching`, :class:`CycleCover`) validate their structure on
construction and expose a canonical form so that all downstream output is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import MalformedInputError, ParameterError, StructuralError


class WeightVector(tuple):
    """A k-dimensional vector of nonnegative integer objective values.

    Subclasses ``tuple``, so comparison, hashing and lexicographic ordering
    come for free.  ``+`` is componentwise (unlike raw tuples).
    """

    __slots__ = ()

    def __new__(cls, values: Iterable[int]) -> "WeightVector":
        vals = tuple(values)
        for v in vals:
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise MalformedInputError(f"weight entries must be nonnegative integers, got {v!r}")
        return tuple.__new__(cls, vals)

    @classmethod
    def zero(cls, k: int) -> "WeightVector":
        return cls((0,) * k)

    def __add__(self, other):  # type: ignore[override]
        return WeightVector(a + b for a, b in zip(self, other, strict=True))

    def scaled(self, factor: int) -> "WeightVector":
        return WeightVector(factor * a for a in self)

    def __repr__(self) -> str:
        return f"WeightVector{tuple(self)!r}"


Edge = tuple[int, int]


def norm_edge(u: int, v: int) -> Edge:
    """Canonical form of an undirected edge: endpoints in ascending order."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Instance:
    """Complete k-weighted graph, immutable after construction.

    ``rows[u][v]`` is the weight vector of edge/arc (u, v); the diagonal is
    ``None``.  Undirected instances store both orientations (mirrored).
    If ``gamma_declared`` is set, the strengthened triangle inequality
    ``w(u,v) <= gamma * (w(u,x) + w(x,v))`` is verified for every criterion
    and every triple of distinct vertices.
    """

    n: int
    k: int
    directed: bool
    rows: tuple[tuple[Optional[WeightVector], ...], ...]
    gamma_declared: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ParameterError(f"instances need at least 3 vertices, got n={self.n}")
        if self.k < 1:
            raise ParameterError(f"instances need at least 1 criterion, got k={self.k}")
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise MalformedInputError("weight table must be an n x n matrix of vectors")
        for u in range(self.n):
            if self.rows[u][u] is not None:
                raise MalformedInputError(f"self-loop weight at vertex {u} must be absent")
            for v in range(self.n):
                if u == v:
                    continue
                w = self.rows[u][v]
                if w is None:
                    raise MalformedInputError(f"missing weight for pair ({u}, {v})")
                if len(w) != self.k:
                    raise MalformedInputError(
                        f"weight vector for ({u}, {v}) has length {len(w)}, expected k={self.k}"
                    )
                if any(c < 1 for c in w):
                    raise MalformedInputError(
                        f"weight vector for ({u}, {v}) must be strictly positive, got {tuple(w)}"
                    )
                if not self.directed and self.rows[v][u] != w:
                    raise MalformedInputError(
                        f"asymmetric weights for undirected pair ({u}, {v})"
                    )
        g = self.gamma_declared
        if g is not None:
            if not (Fraction(1, 2) <= g <= 1):
                raise ParameterError(f"gamma must lie in [1/2, 1], got {g}")
            bad = self.gamma_violation(g)
            if bad is not None:
                i, u, x, v, lhs, rhs = bad
                raise ParameterError(
                    f"declared gamma={g} violated on criterion {i} by triple "
                    f"({u}, {x}, {v}): {lhs} > {g} * {rhs}"
                )

    # -- accessors ---------------------------------------------------------

    def weight(self, u: int, v: int) -> WeightVector:
        if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
            raise MalformedInputError(f"unknown edge ({u}, {v}) for n={self.n}")
        w = self.rows[u][v]
        assert w is not None
        return w

    def edge_iter(self) -> Iterator[Edge]:
        """All edges in canonical order: ordered pairs if directed, u < v otherwise."""
        if self.directed:
            return ((u, v) for u in range(self.n) for v in range(self.n) if u != v)
        return ((u, v) for u in range(self.n) for v in range(u + 1, self.n))

    def weight_values(self, criterion: int) -> list[int]:
        return [self.rows[u][v][criterion] for u, v in self.edge_iter()]  # type: ignore[index]

    def min_weight(self, criterion: int) -> int:
        return min(self.weight_values(criterion))

    def max_weight(self, criterion: int) -> int:
        return max(self.weight_values(criterion))

    def weight_matrix(self, criterion: int) -> list[list[int]]:
        """n x n integer matrix for one criterion, zero on the diagonal."""
        return [
            [0 if u == v else self.rows[u][v][criterion] for v in range(self.n)]  # type: ignore[index]
            for u in range(self.n)
        ]

    @property
    def is_one_two(self) -> bool:
        return all(set(w) <= {1, 2} for row in self.rows for w in row if w is not None)

    def gamma_violation(
        self, gamma: Fraction
    ) -> Optional[tuple[int, int, int, int, int, int]]:
        """First triple violating the gamma-strengthened triangle inequality.

        Returns ``(criterion, u, x, v, w(u,v), w(u,x)+w(x,v))`` or ``None``.
        Checks ordered triples for directed instances, O(k * n^3) overall.
        """
        n = self.n
        for i in range(self.k):
            m = self.weight_matrix(i)
            for u in range(n):
                for v in range(n):
                    if v == u:
                        continue
                    if not self.directed and v < u:
                        continue
                    wuv = m[u][v]
                    for x in range(n):
                        if x == u or x == v:
                            continue
                        s = m[u][x] + m[x][v]
                        if wuv > gamma * s:
                            return (i, u, x, v, wuv, s)
        return None


# -- solution types --------------------------------------------------------


@dataclass(frozen=True)
class Tour:
    """Hamiltonian cycle, stored as a canonical vertex order.

    The order is rotated so the smallest vertex comes first; for undirected
    tours the traversal direction is fixed by requiring the second vertex to
    be smaller than the last.  Storing a vertex permutation makes the
    degree-2 / single-cycle invariants hold by construction.
    """

    order: tuple[int, ...]
    directed: bool

    def __post_init__(self) -> None:
        if len(self.order) < 3:
            raise StructuralError(f"a tour needs at least 3 vertices, got {len(self.order)}")
        if len(set(self.order)) != len(self.order):
            raise StructuralError("tour visits a vertex more than once")
        rot = _rotate_min_first(self.order)
        if not self.directed and rot[1] > rot[-1]:
            rot = (rot[0],) + tuple(reversed(rot[1:]))
        object.__setattr__(self, "order", rot)

    @property
    def n(self) -> int:
        return len(self.order)

    def edges(self) -> tuple[Edge, ...]:
        """Edges in traversal order (arcs keep orientation, undirected edges are normalized)."""
        pairs = list(zip(self.order, self.order[1:] + self.order[:1]))
        if self.directed:
            return tuple(pairs)
        return tuple(norm_edge(u, v) for u, v in pairs)

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges()))


def validate_tour(inst: Instance, tour: Tour) -> None:
    """Hamiltonicity check against an instance: n edges, every vertex once, one cycle."""
    if tour.directed != inst.directed:
        raise StructuralError("tour orientation does not match the instance")
    if sorted(tour.order) != list(range(inst.n)):
        raise StructuralError(
            f"tour covers vertices {sorted(set(tour.order))}, expected 0..{inst.n - 1}"
        )


@dataclass(frozen=True)
class SpanningTree:
    """n-1 undirected edges that connect all n vertices without a cycle."""

    n: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        edges = frozenset(norm_edge(u, v) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if len(edges) != self.n - 1:
            raise StructuralError(f"spanning tree on {self.n} vertices needs {self.n - 1} edges")
        parent = list(range(self.n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise StructuralError(f"edge ({u}, {v}) is not a valid tree edge for n={self.n}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise StructuralError(f"tree edges contain a cycle through ({u}, {v})")
            parent[ru] = rv

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges))


def odd_vertices(tree: SpanningTree) -> frozenset[int]:
    """Vertices of odd degree in the tree; their count is always even."""
    return frozenset(v for v, d in enumerate(tree.degrees()) if d % 2 == 1)


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint undirected edges."""

    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        edges = frozenset(norm_edge(u, v) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set[int] = set()
        for u, v in edges:
            if u == v:
                raise StructuralError(f"matching contains a self-loop at {u}")
            if u in seen or v in seen:
                raise StructuralError(f"matching edges share endpoint {u if u in seen else v}")
            seen.add(u)
            seen.add(v)

    def vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    def is_perfect_on(self, subset: frozenset[int]) -> bool:
        return self.vertices() == subset

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class CycleCover:
    """Partition of all n vertices into cycles.

    Each cycle is stored as a canonical vertex sequence (smallest vertex
    first; undirected cycles additionally pick the direction whose second
    vertex is smaller).  Undirected cycles must have length >= 3, directed
    cycles length >= 2.
    """

    n: int
    cycles: tuple[tuple[int, ...], ...]
    directed: bool

    def __post_init__(self) -> None:
        canon = []
        for cyc in self.cycles:
            if self.directed:
                if len(cyc) < 2:
                    raise StructuralError(f"directed cycle {cyc} is shorter than 2")
            elif len(cyc) < 3:
                raise StructuralError(f"undirected cycle {cyc} is shorter than 3")
            rot = _rotate_min_first(tuple(cyc))
            if not self.directed and len(rot) >= 3 and rot[1] > rot[-1]:
                rot = (rot[0],) + tuple(reversed(rot[1:]))
            canon.append(rot)
        canon.sort(key=lambda c: c[0])
        object.__setattr__(self, "cycles", tuple(canon))
        flat = [v for cyc in self.cycles for v in cyc]
        if sorted(flat) != list(range(self.n)):
            raise StructuralError("cycle cover must place every vertex on exactly one cycle")

    def edges(self) -> tuple[Edge, ...]:
        out: list[Edge] = []
        for cyc in self.cycles:
            pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
            if len(cyc) == 2 and not self.directed:
                raise StructuralError("undirected 2-cycles are not representable")
            if self.directed:
                out.extend(pairs)
            else:
                out.extend(norm_edge(u, v) for u, v in pairs)
        return tuple(out)

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.edges()))


@dataclass(frozen=True)
class Multigraph:
    """Undirected edge multiset over vertices 0..n-1, the Eulerian intermediate."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        norm = tuple(sorted(norm_edge(u, v) for u, v in self.edges))
        for u, v in norm:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise MalformedInputError(f"bad multigraph edge ({u}, {v}) for n={self.n}")
        object.__setattr__(self, "edges", norm)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def doubled(tree: SpanningTree) -> Multigraph:
    """Every tree edge twice; all degrees even, so an Euler circuit exists."""
    es = tuple(tree.edges)
    return Multigraph(tree.n, es + es)


def union_multigraph(tree: SpanningTree, matching: Matching) -> Multigraph:
    """Tree plus matching as a multiset (shared edges get multiplicity 2)."""
    return Multigraph(tree.n, tuple(tree.edges) + tuple(matching.edges))


# -- operations ------------------------------------------------------------


def total_weight(inst: Instance, edges: Iterable[Edge]) -> WeightVector:
    """Componentwise weight of an edge multiset, counting multiplicities."""
    acc = [0] * inst.k
    for u, v in edges:
        w = inst.weight(u, v)
        for i in range(inst.k):
            acc[i] += w[i]
    return WeightVector(acc)


def euler_circuit(m: Multigraph, start: int) -> list[int]:
    """Closed walk traversing every multigraph edge exactly once.

    Hierholzer's construction with adjacency consumed in ascending vertex
    order, so the walk is deterministic.  Raises ``StructuralError`` naming
    an odd-degree vertex or a vertex unreachable from ``start``.
    """
    if not (0 <= start < m.n):
        raise MalformedInputError(f"start vertex {start} outside 0..{m.n - 1}")
    deg = m.degrees()
    for v, d in enumerate(deg):
        if d % 2 == 1:
            raise StructuralError(f"vertex {v} has odd degree {d}, no Euler circuit exists")
        if d == 0:
            raise StructuralError(f"vertex {v} is isolated, multigraph is disconnected")

    adj: list[list[tuple[int, int]]] = [[] for _ in range(m.n)]
    for eid, (u, v) in enumerate(m.edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for lst in adj:
        lst.sort()

    used = [False] * len(m.edges)
    ptr = [0] * m.n
    stack = [start]
    walk: list[int] = []
    while stack:
        v = stack[-1]
        lst = adj[v]
        i = ptr[v]
        while i < len(lst) and used[lst[i][1]]:
            i += 1
        ptr[v] = i
        if i == len(lst):
            walk.append(stack.pop())
        else:
            nxt, eid = lst[i]
            used[eid] = True
            stack.append(nxt)
    if not all(used):
        comp = sorted({v for eid, (u, v) in enumerate(m.edges) if not used[eid] for v in (u, v)})
        raise StructuralError(f"multigraph is disconnected; unreached component includes {comp}")
    walk.reverse()
    return walk


def shortcut_walk(inst: Instance, walk: list[int]) -> Tour:
    """Hamiltonian cycle keeping the first occurrence of each walk vertex.

    The walk must be closed and visit every vertex at least once.  With a
    declared gamma <= 1 the shortcut edges never weigh more than the
    subpaths they replace, so no weight component increases.
    """
    if len(walk) < 2 or walk[0] != walk[-1]:
        raise StructuralError("walk must be closed (start == end)")
    seen: set[int] = set()
    order: list[int] = []
    for v in walk:
        if v not in seen:
            seen.add(v)
            order.append(v)
    missing = [v for v in range(inst.n) if v not in seen]
    if missing:
        raise StructuralError(f"walk never visits vertices {missing}")
    return Tour(tuple(order), inst.directed)


def _rotate_min_first(order: tuple[int, ...]) -> tuple[int, ...]:
    i = order.index(min(order))
    return order[i:] + order[:i]
