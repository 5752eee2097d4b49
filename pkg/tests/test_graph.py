from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mctsp.errors import MalformedInputError, ParameterError, StructuralError
from mctsp.graph import (
    CycleCover,
    Matching,
    Multigraph,
    SpanningTree,
    Tour,
    WeightVector,
    doubled,
    euler_circuit,
    norm_edge,
    odd_vertices,
    shortcut_walk,
    total_weight,
    union_multigraph,
    validate_tour,
)
from reference import make_instance


def uniform(n, value=5, k=1, directed=False):
    mats = [[[0 if u == v else value for v in range(n)] for u in range(n)] for _ in range(k)]
    return make_instance(mats, directed=directed, gamma=Fraction(1, 2))


class TestWeightVector:
    def test_componentwise_add(self):
        assert WeightVector((1, 2)) + WeightVector((3, 4)) == WeightVector((4, 6))

    def test_zero(self):
        assert WeightVector.zero(3) == (0, 0, 0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            WeightVector((1, 2)) + WeightVector((1, 2, 3))

    @pytest.mark.parametrize("bad", [(-1,), (1.5,), (True,), ("3",)])
    def test_non_natural_entries_rejected(self, bad):
        with pytest.raises(MalformedInputError):
            WeightVector(bad)

    def test_scaled(self):
        assert WeightVector((2, 5)).scaled(3) == (6, 15)


class TestInstance:
    def test_round_weights(self):
        inst = make_instance([[[0, 3, 2], [3, 0, 2], [2, 2, 0]]])
        assert inst.weight(0, 1) == (3,)
        assert inst.min_weight(0) == 2 and inst.max_weight(0) == 3

    def test_asymmetric_undirected_rejected(self):
        with pytest.raises(MalformedInputError):
            make_instance([[[0, 3, 2], [4, 0, 2], [2, 2, 0]]])

    def test_directed_asymmetry_allowed(self):
        inst = make_instance([[[0, 3, 2], [4, 0, 2], [2, 2, 0]]], directed=True)
        assert inst.weight(0, 1) == (3,) and inst.weight(1, 0) == (4,)

    def test_zero_off_diagonal_rejected(self):
        with pytest.raises(MalformedInputError):
            make_instance([[[0, 0, 2], [0, 0, 2], [2, 2, 0]]])

    def test_too_small_rejected(self):
        with pytest.raises(ParameterError):
            make_instance([[[0, 1], [1, 0]]])

    def test_declared_gamma_validated(self):
        mats = [[[0, 3, 2], [3, 0, 2], [2, 2, 0]]]
        make_instance(mats, gamma=Fraction(3, 4))  # tight, accepted
        with pytest.raises(ParameterError) as exc:
            make_instance(mats, gamma=Fraction(7, 10))
        assert "triple" in str(exc.value)

    def test_gamma_range_enforced(self):
        with pytest.raises(ParameterError):
            uniform_inst = make_instance(
                [[[0, 5, 5], [5, 0, 5], [5, 5, 0]]], gamma=Fraction(1, 3)
            )

    def test_edge_iter_counts(self):
        assert len(list(uniform(4).edge_iter())) == 6
        assert len(list(uniform(4, directed=True).edge_iter())) == 12

    def test_is_one_two(self):
        assert make_instance([[[0, 1, 2], [1, 0, 2], [2, 2, 0]]]).is_one_two
        assert not uniform(3).is_one_two


class TestTour:
    def test_rotation_and_reflection_canonical(self):
        a = Tour((2, 0, 1, 3), directed=False)
        b = Tour((2, 3, 1, 0), directed=False)
        assert a.order == b.order == (0, 1, 3, 2)

    def test_directed_orientation_preserved(self):
        fwd = Tour((2, 0, 1, 3), directed=True)
        rev = Tour((0, 2, 3, 1), directed=True)
        assert fwd.order == (0, 1, 3, 2)
        assert rev.order == (0, 2, 3, 1)
        assert fwd.order != rev.order

    def test_edges_undirected_normalized(self):
        t = Tour((0, 2, 1), directed=False)
        assert set(t.edges()) == {(0, 2), (1, 2), (0, 1)}

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(StructuralError):
            Tour((0, 1, 1, 2), directed=False)

    def test_short_tour_rejected(self):
        with pytest.raises(StructuralError):
            Tour((0, 1), directed=False)

    def test_validate_against_instance(self):
        inst = uniform(4)
        validate_tour(inst, Tour((0, 1, 2, 3), directed=False))
        with pytest.raises(StructuralError):
            validate_tour(inst, Tour((0, 1, 2, 4), directed=False))
        with pytest.raises(StructuralError):
            validate_tour(inst, Tour((0, 1, 2, 3), directed=True))


class TestTreeMatchingCover:
    def test_tree_cycle_rejected(self):
        with pytest.raises(StructuralError):
            SpanningTree(4, frozenset({(0, 1), (1, 2), (0, 2)}))

    def test_tree_edge_count_enforced(self):
        with pytest.raises(StructuralError):
            SpanningTree(4, frozenset({(0, 1), (2, 3)}))

    def test_odd_vertices_of_path(self):
        path = SpanningTree(4, frozenset({(0, 1), (1, 2), (2, 3)}))
        assert odd_vertices(path) == {0, 3}

    def test_matching_disjointness(self):
        Matching(frozenset({(0, 1), (2, 3)}))
        with pytest.raises(StructuralError):
            Matching(frozenset({(0, 1), (1, 2)}))

    def test_cover_canonical_form(self):
        c = CycleCover(6, ((3, 5, 4), (2, 0, 1)), directed=False)
        assert c.cycles == ((0, 1, 2), (3, 4, 5))

    def test_undirected_two_cycle_rejected(self):
        with pytest.raises(StructuralError):
            CycleCover(4, ((0, 1), (2, 3)), directed=False)

    def test_directed_two_cycles_allowed(self):
        c = CycleCover(4, ((1, 0), (2, 3)), directed=True)
        assert c.cycles == ((0, 1), (2, 3))
        assert set(c.edges()) == {(0, 1), (1, 0), (2, 3), (3, 2)}

    def test_cover_must_partition(self):
        with pytest.raises(StructuralError):
            CycleCover(6, ((0, 1, 2),), directed=False)
        with pytest.raises(StructuralError):
            CycleCover(6, ((0, 1, 2), (2, 3, 4)), directed=False)


class TestEuler:
    def test_doubled_path_walk(self):
        tree = SpanningTree(3, frozenset({(0, 1), (1, 2)}))
        assert euler_circuit(doubled(tree), start=0) == [0, 1, 2, 1, 0]

    def test_doubled_star_walk(self):
        tree = SpanningTree(4, frozenset({(0, 1), (1, 2), (1, 3)}))
        assert euler_circuit(doubled(tree), start=0) == [0, 1, 2, 1, 3, 1, 0]

    def test_odd_degree_reported(self):
        m = Multigraph(3, ((0, 1), (1, 2)))
        with pytest.raises(StructuralError) as exc:
            euler_circuit(m, start=0)
        assert "odd degree" in str(exc.value)

    def test_disconnected_reported(self):
        m = Multigraph(4, ((0, 1), (0, 1), (2, 3), (2, 3)))
        with pytest.raises(StructuralError):
            euler_circuit(m, start=0)

    @given(st.integers(3, 7), st.data())
    def test_doubled_random_tree_traverses_each_edge_once(self, n, data):
        seq = data.draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
        edges = _decode_sequence(n, seq)
        tree = SpanningTree(n, frozenset(edges))
        m = doubled(tree)
        walk = euler_circuit(m, start=0)
        assert walk[0] == walk[-1] == 0
        assert len(walk) == 2 * (n - 1) + 1
        used = sorted(norm_edge(walk[i], walk[i + 1]) for i in range(len(walk) - 1))
        assert used == sorted(m.edges)


def _decode_sequence(n, seq):
    """Plain single-sequence decoder, kept independent of the library."""
    deg = [1] * n
    for s in seq:
        deg[s] += 1
    edges = []
    for s in seq:
        leaf = deg.index(1)
        edges.append(norm_edge(leaf, s))
        deg[leaf] -= 1
        deg[s] -= 1
    u = deg.index(1)
    v = deg.index(1, u + 1)
    edges.append((u, v))
    return edges


class TestShortcut:
    def test_first_occurrence_order(self):
        inst = uniform(4)
        tour = shortcut_walk(inst, [0, 1, 2, 1, 3, 1, 0])
        assert tour.order == (0, 1, 2, 3)

    def test_open_walk_rejected(self):
        with pytest.raises(StructuralError):
            shortcut_walk(uniform(4), [0, 1, 2, 3])

    def test_missing_vertex_reported(self):
        with pytest.raises(StructuralError) as exc:
            shortcut_walk(uniform(5), [0, 1, 2, 3, 0])
        assert "4" in str(exc.value)


class TestWeights:
    def test_total_weight_counts_multiplicity(self):
        inst = make_instance([[[0, 3, 2], [3, 0, 7], [2, 7, 0]]])
        assert total_weight(inst, [(0, 1), (0, 1), (1, 2)]) == (13,)

    def test_union_multigraph_keeps_duplicates(self):
        tree = SpanningTree(3, frozenset({(0, 1), (1, 2)}))
        union = union_multigraph(tree, Matching(frozenset({(0, 2)})))
        assert sorted(union.edges) == [(0, 1), (0, 2), (1, 2)]
        assert union.degrees() == [2, 2, 2]
        again = union_multigraph(tree, Matching(frozenset({(0, 1)})))
        assert sorted(again.edges) == [(0, 1), (0, 1), (1, 2)]
