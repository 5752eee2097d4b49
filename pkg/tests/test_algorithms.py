from fractions import Fraction

import pytest

from mctsp import oracles
from mctsp.algorithms import (
    cc_variant,
    christofides_multi,
    cycle_cover_patch,
    patch_cover,
    tree_doubling,
)
from mctsp.analysis import model_for_algorithm, ratio_bound
from mctsp.errors import CapExceededError, ParameterError, StructuralError
from mctsp.graph import CycleCover, Tour, validate_tour
from mctsp.instances import GenSpec, generate
from mctsp.oracles import approx_oracle, oracle_tours
from mctsp.pareto import ParetoSet, coverage_beta
from reference import make_instance

EPS = Fraction(1, 10)


def gen(variant, n, seed, gamma=None, k=2):
    return generate(GenSpec(n=n, k=k, variant=variant, seed=seed, gamma=gamma))


def covered_within_bound(inst, front, algorithm, eps, beta_cap=None):
    """Validate every tour, then check coverage against the closed form."""
    assert len(front) > 0
    for it in front:
        validate_tour(inst, it.solution)
    bound = ratio_bound(model_for_algorithm(inst, algorithm, eps, beta_cap))
    beta = coverage_beta(front, oracle_tours(inst)).beta
    assert beta is not None
    assert beta <= bound, f"beta {beta} exceeds bound {bound}"
    return beta


class TestTreeDoubling:
    def test_directed_rejected(self):
        inst = gen("gamma_metric_directed", 5, 0, gamma=Fraction(11, 20))
        with pytest.raises(ParameterError, match="undirected required"):
            tree_doubling(inst, EPS)

    @pytest.mark.parametrize("eps", [Fraction(0), Fraction(-1, 10)])
    def test_nonpositive_eps_rejected(self, eps):
        inst = gen("gamma_metric_undirected", 5, 0, gamma=Fraction(7, 10))
        with pytest.raises(ParameterError):
            tree_doubling(inst, eps)

    def test_uniform_weights_hit_optimum(self):
        inst = gen("gamma_metric_undirected", 6, 0, gamma=Fraction(1, 2))
        front = tree_doubling(inst, EPS)
        assert coverage_beta(front, oracle_tours(inst)).beta == 1

    def test_plain_metric_within_two(self):
        for seed in range(3):
            inst = gen("metric_closure", 6, seed)
            front = tree_doubling(inst, EPS)
            beta = covered_within_bound(inst, front, "tree-doubling", EPS)
            assert beta <= 2 + EPS

    @pytest.mark.parametrize("seed", range(5))
    def test_gamma_bound(self, seed):
        inst = gen("gamma_metric_undirected", 7, seed, gamma=Fraction(7, 10))
        bound = ratio_bound(model_for_algorithm(inst, "tree-doubling", EPS))
        assert bound == Fraction(49, 29) + EPS
        front = tree_doubling(inst, EPS)
        covered_within_bound(inst, front, "tree-doubling", EPS)

    def test_sources_name_trees(self):
        inst = gen("gamma_metric_undirected", 6, 1, gamma=Fraction(4, 5))
        for it in tree_doubling(inst, EPS):
            assert len(it.source) == 1
            tag, key = it.source[0]
            assert tag == "tree" and len(key) == inst.n - 1

    def test_deterministic(self):
        inst = gen("gamma_metric_undirected", 6, 2, gamma=Fraction(4, 5))
        assert tree_doubling(inst, EPS) == tree_doubling(inst, EPS)


class TestChristofides:
    def test_directed_rejected(self):
        inst = gen("gamma_metric_directed", 5, 0, gamma=Fraction(11, 20))
        with pytest.raises(ParameterError, match="undirected required"):
            christofides_multi(inst, EPS)

    def test_zero_eps_rejected(self):
        inst = gen("gamma_metric_undirected", 5, 0, gamma=Fraction(7, 10))
        with pytest.raises(ParameterError):
            christofides_multi(inst, Fraction(0))

    def test_uniform_weights_hit_optimum(self):
        inst = gen("gamma_metric_undirected", 6, 3, gamma=Fraction(1, 2))
        front = christofides_multi(inst, EPS)
        assert coverage_beta(front, oracle_tours(inst)).beta == 1

    def test_plain_metric_within_two(self):
        inst = gen("metric_closure", 6, 1)
        beta = covered_within_bound(inst, christofides_multi(inst, EPS), "christofides", EPS)
        assert beta <= 2 + EPS

    @pytest.mark.parametrize("seed", range(5))
    def test_gamma_bound(self, seed):
        inst = gen("gamma_metric_undirected", 7, seed, gamma=Fraction(4, 5))
        bound = ratio_bound(model_for_algorithm(inst, "christofides", EPS))
        assert bound == Fraction(96, 55) + EPS
        covered_within_bound(inst, christofides_multi(inst, EPS), "christofides", EPS)

    def test_sources_name_tree_and_matching(self):
        inst = gen("gamma_metric_undirected", 6, 1, gamma=Fraction(4, 5))
        for it in christofides_multi(inst, EPS):
            tags = [tag for tag, _ in it.source]
            assert tags == ["tree", "matching"]

    def test_matching_cap_names_the_tree(self, monkeypatch):
        monkeypatch.setitem(oracles.DEFAULT_CAPS, "matching", 2)
        mats = [[[0 if u == v else 9 for v in range(6)] for u in range(6)]] * 2
        inst = make_instance(mats, gamma=Fraction(1, 2))
        with pytest.raises(CapExceededError, match="odd-degree vertices of tree"):
            christofides_multi(inst, EPS)

    def test_deterministic_backend_called_once_per_tree(self):
        inst = gen("gamma_metric_undirected", 6, 0, gamma=Fraction(7, 10))
        calls = []

        def backend(subset, eps):
            calls.append(subset)
            return approx_oracle("matching", inst, eps, subset=subset)

        front = christofides_multi(inst, EPS, matching_oracle=backend)
        p = len(approx_oracle("tree", inst, EPS / 2))
        assert len(calls) == p
        assert front == christofides_multi(inst, EPS)

    def test_randomized_oracle_is_amplified(self):
        inst = gen("gamma_metric_undirected", 6, 0, gamma=Fraction(7, 10))
        p = len(approx_oracle("tree", inst, EPS / 2))
        assert p >= 2  # ensures at least two rounds below

        class Flaky:
            randomized = True
            calls = 0

            def __call__(self, subset, eps):
                i = Flaky.calls
                Flaky.calls += 1
                if i % 2 == 0:  # every other run yields nothing
                    return ParetoSet("matching", ())
                return approx_oracle("matching", inst, eps, subset=subset)

        front = christofides_multi(inst, EPS, matching_oracle=Flaky())
        rounds = (2 * p - 1).bit_length()
        assert rounds >= 2
        assert Flaky.calls == p * rounds
        covered_within_bound(inst, front, "christofides", EPS)


GREEDY_MATS = [
    [
        [0, 5, 5, 9, 9, 9],
        [5, 0, 5, 9, 2, 9],
        [5, 5, 0, 9, 9, 9],
        [9, 9, 9, 0, 5, 5],
        [9, 2, 9, 5, 0, 5],
        [9, 9, 9, 5, 5, 0],
    ]
]

HEAVY_MATS = [
    [
        [0, 2, 9, 4, 4, 4],
        [2, 0, 3, 4, 4, 4],
        [9, 3, 0, 4, 4, 4],
        [4, 4, 4, 0, 5, 5],
        [4, 4, 4, 5, 0, 5],
        [4, 4, 4, 5, 5, 0],
    ]
]

TRIANGLES = CycleCover(6, ((0, 1, 2), (3, 4, 5)), directed=False)


class TestPatchCover:
    def test_single_cycle_is_identity(self):
        inst = make_instance(GREEDY_MATS)
        cover = CycleCover(6, ((0, 1, 2, 3, 4, 5),), directed=False)
        assert patch_cover(inst, cover).order == (0, 1, 2, 3, 4, 5)

    def test_canonical_first_two_triangles(self):
        inst = make_instance(GREEDY_MATS)
        tour = patch_cover(inst, TRIANGLES, policy="canonical-first")
        assert tour.order == (0, 2, 1, 3, 5, 4)
        kept = set(tour.edges()) & set(TRIANGLES.edges())
        assert len(kept) == 4  # one edge dropped per triangle, two bridges added

    def test_greedy_join_prefers_cheap_endpoint(self):
        inst = make_instance(GREEDY_MATS)
        tour = patch_cover(
            inst, TRIANGLES, policy="canonical-first", join="greedy-nearest-endpoint"
        )
        # w(1, 4) = 2 beats w(1, 3) = 9, so the second path arrives reversed
        assert tour.order == (0, 2, 1, 4, 5, 3)

    def test_aggregate_heaviest_drops_heavy_edge(self):
        inst = make_instance(HEAVY_MATS)
        tour = patch_cover(inst, TRIANGLES, policy="aggregate-heaviest")
        assert tour.order == (0, 1, 2, 3, 5, 4)
        assert (0, 2) not in set(tour.edges())

    def test_directed_two_cycles(self):
        mats = [[[0 if u == v else 3 for v in range(4)] for u in range(4)]]
        inst = make_instance(mats, directed=True)
        cover = CycleCover(4, ((0, 1), (2, 3)), directed=True)
        tour = patch_cover(inst, cover)
        assert tour.order == (0, 3, 2, 1)
        assert {(1, 0), (3, 2)} <= set(tour.edges())
        validate_tour(inst, tour)

    def test_unknown_policy_and_join(self):
        inst = make_instance(GREEDY_MATS)
        with pytest.raises(ParameterError, match="removal policy"):
            patch_cover(inst, TRIANGLES, policy="random")
        with pytest.raises(ParameterError, match="join order"):
            patch_cover(inst, TRIANGLES, join="fifo")

    def test_foreign_cover_rejected(self):
        mats = [[[0 if u == v else 2 for v in range(7)] for u in range(7)]]
        inst7 = make_instance(mats)
        with pytest.raises(StructuralError, match="does not belong"):
            patch_cover(inst7, TRIANGLES)


class TestCycleCoverVariantSelection:
    def test_one_two_takes_precedence(self):
        inst = gen("one_two_undirected", 6, 0)
        assert inst.gamma_declared == 1  # declared, yet the {1,2} form wins
        assert cc_variant(inst) == ("cc_stsp12", {})
        assert cc_variant(gen("one_two_directed", 6, 0)) == ("cc_atsp12", {})

    def test_refined_undirected(self):
        inst = gen("gamma_metric_undirected", 6, 0, gamma=Fraction(3, 5))
        assert cc_variant(inst) == ("cc_stsp_refined", {"gamma": Fraction(3, 5)})

    def test_plain_metric_falls_back_to_spread(self):
        inst = gen("metric_closure", 6, 0)
        tag, params = cc_variant(inst)
        assert tag == "cc_generic" and params["alpha"] == Fraction(1, 3)
        assert params["beta"] >= 1

    def test_directed_gamma_domain(self):
        inst = gen("gamma_metric_directed", 6, 0, gamma=Fraction(11, 20))
        assert cc_variant(inst) == ("cc_atsp_gamma", {"gamma": Fraction(11, 20)})

    def test_directed_outside_domain_needs_cap(self):
        inst = gen("gamma_metric_directed", 6, 0, gamma=Fraction(4, 5))
        with pytest.raises(ParameterError, match="beta_cap"):
            cc_variant(inst)
        tag, params = cc_variant(inst, beta_cap=Fraction(4))
        assert tag == "cc_generic"
        assert params == {"alpha": Fraction(1, 2), "beta": Fraction(4)}

    def test_cap_below_actual_spread(self):
        inst = gen("gamma_metric_directed", 6, 0, gamma=Fraction(4, 5))
        with pytest.raises(ParameterError, match="spread"):
            cc_variant(inst, beta_cap=Fraction(1))


class TestCycleCoverPatch:
    def test_negative_eps_rejected(self):
        inst = gen("one_two_undirected", 6, 0)
        with pytest.raises(ParameterError):
            cycle_cover_patch(inst, Fraction(-1, 2))

    @pytest.mark.parametrize("seed", range(5))
    def test_one_two_undirected_four_thirds(self, seed):
        inst = gen("one_two_undirected", 7, seed)
        front = cycle_cover_patch(inst, Fraction(0))
        beta = covered_within_bound(inst, front, "cycle-cover", Fraction(0))
        assert beta <= Fraction(4, 3)

    @pytest.mark.parametrize("seed", range(5))
    def test_one_two_directed_three_halves(self, seed):
        inst = gen("one_two_directed", 6, seed)
        front = cycle_cover_patch(inst, Fraction(0))
        beta = covered_within_bound(inst, front, "cycle-cover", Fraction(0))
        assert beta <= Fraction(3, 2)

    @pytest.mark.parametrize("seed", range(4))
    def test_refined_undirected_bound(self, seed):
        inst = gen("gamma_metric_undirected", 7, seed, gamma=Fraction(3, 5))
        bound = ratio_bound(model_for_algorithm(inst, "cycle-cover", EPS))
        assert bound == Fraction(20, 17) + EPS
        front = cycle_cover_patch(inst, EPS)
        covered_within_bound(inst, front, "cycle-cover", EPS)

    @pytest.mark.parametrize("seed", range(4))
    def test_directed_gamma_bound(self, seed):
        inst = gen("gamma_metric_directed", 6, seed, gamma=Fraction(11, 20))
        front = cycle_cover_patch(inst, EPS)
        covered_within_bound(inst, front, "cycle-cover", EPS)

    def test_directed_needs_cap_outside_domain(self):
        inst = gen("gamma_metric_directed", 6, 0, gamma=Fraction(4, 5))
        with pytest.raises(ParameterError, match="beta_cap"):
            cycle_cover_patch(inst, EPS)
        front = cycle_cover_patch(inst, EPS, beta_cap=Fraction(4))
        bound = ratio_bound(model_for_algorithm(inst, "cycle-cover", EPS, Fraction(4)))
        assert bound == Fraction(5, 2) + EPS
        beta = covered_within_bound(inst, front, "cycle-cover", EPS, Fraction(4))
        assert beta <= bound

    def test_plain_metric_generic_bound(self):
        inst = gen("metric_closure", 6, 2)
        front = cycle_cover_patch(inst, EPS)
        covered_within_bound(inst, front, "cycle-cover", EPS)

    def test_policy_and_join_combinations_all_obey_bound(self):
        inst = gen("gamma_metric_undirected", 6, 1, gamma=Fraction(3, 5))
        for policy in ("aggregate-heaviest", "canonical-first"):
            for join in ("canonical", "greedy-nearest-endpoint"):
                front = cycle_cover_patch(inst, EPS, policy=policy, join=join)
                covered_within_bound(inst, front, "cycle-cover", EPS)

    def test_sources_name_covers(self):
        inst = gen("one_two_undirected", 6, 2)
        for it in cycle_cover_patch(inst, Fraction(0)):
            assert it.source[0][0] == "cover"

    def test_deterministic(self):
        inst = gen("gamma_metric_undirected", 6, 4, gamma=Fraction(3, 5))
        assert cycle_cover_patch(inst, EPS) == cycle_cover_patch(inst, EPS)
