"""Tests for GA individuals, selection, crossovers and mutations."""
import math

import numpy as np
import pytest

from app.exceptions import DimensionMismatchError, PermutationError
from app.ga.crossover import (
    crossover_classical,
    crossover_x,
    cycle_crossover,
    edge_recombination,
    order_crossover,
    partially_mapped_crossover,
    perm_for_white_set,
    sample_white_set
)
from app.ga.individual import Individual, apply_permutation, fitness, invert_permutation
from app.ga.mutation import (
    insert_mutation,
    invert_segment,
    mutate,
    scramble_segment,
    swap_positions
)
from app.ga.selection import linear_ranking_probabilities, rank_population, select_parent
from app.models.images import BinaryWatermark
from app.models.schemas import CrossoverKind, MutationKind


def _is_permutation(perm, n):
    return sorted(np.asarray(perm).tolist()) == list(range(n))


class TestPermutation:
    """Test watermark permutation."""

    def test_identity(self, sparse_wm):
        """Identity permutation leaves the mark unchanged."""
        assert apply_permutation(sparse_wm, np.arange(sparse_wm.size)) == sparse_wm

    def test_reverse_two_by_two(self):
        """Reversing all positions moves the top-left bit to the bottom-right."""
        wm = BinaryWatermark(bits=np.array([[1, 0], [0, 0]]))
        out = apply_permutation(wm, np.array([3, 2, 1, 0]))
        assert out.bits.tolist() == [[0, 0], [0, 1]]

    def test_white_count_preserved_and_invertible(self, sparse_wm, rng):
        """Any permutation keeps k and is undone by the inverse."""
        perm = rng.permutation(sparse_wm.size)
        permuted = apply_permutation(sparse_wm, perm)

        assert permuted.white_count == sparse_wm.white_count
        assert invert_permutation(permuted, perm) == sparse_wm

    def test_length_mismatch(self, sparse_wm):
        """Permutations of the wrong length are rejected."""
        with pytest.raises(DimensionMismatchError):
            apply_permutation(sparse_wm, np.arange(10))

    def test_non_bijection(self):
        """Repeated images are rejected."""
        wm = BinaryWatermark(bits=np.array([[1, 0], [0, 0]]))
        with pytest.raises(PermutationError):
            apply_permutation(wm, np.array([0, 0, 1, 2]))


class TestFitness:
    """Test individual fitness."""

    def test_identity_individual(self, sparse_wm):
        """Identity correlates perfectly."""
        ind = Individual.from_perm(sparse_wm, np.arange(sparse_wm.size))
        assert ind.fitness == pytest.approx(1.0)
        assert fitness(sparse_wm, ind) == pytest.approx(ind.fitness)

    def test_disjoint_white_set(self):
        """Moving all whites onto blacks gives zero."""
        wm = BinaryWatermark(bits=np.array([[1, 1], [0, 0]]))
        ind = Individual.from_perm(wm, np.array([2, 3, 0, 1]))
        assert ind.fitness == 0.0
        assert ind.white_set.tolist() == [2, 3]

    def test_fitness_equals_overlap_ratio(self, sparse_wm, rng):
        """For binary marks NC equals |overlap| / k."""
        ind = Individual.from_perm(sparse_wm, rng.permutation(sparse_wm.size))
        overlap = np.intersect1d(sparse_wm.white_positions, ind.white_set).size
        assert ind.fitness == pytest.approx(overlap / sparse_wm.white_count)

    def test_dense_lower_bound(self, dense_wm, rng):
        """Density 0.8 can never go below (2k - m^2) / k."""
        k = dense_wm.white_count
        bound = (2 * k - dense_wm.size) / k
        for _ in range(20):
            ind = Individual.from_perm(dense_wm, rng.permutation(dense_wm.size))
            assert ind.fitness >= bound - 1e-12

    def test_signature_depends_on_white_set_only(self):
        """Permutations with the same white set share a signature."""
        wm = BinaryWatermark(bits=np.array([[1, 0], [0, 0]]))
        a = Individual.from_perm(wm, np.array([1, 0, 2, 3]))
        b = Individual.from_perm(wm, np.array([1, 2, 0, 3]))
        assert a.signature == b.signature
        assert a.perm_one_based() == [2, 1, 3, 4]


class TestSelection:
    """Test linear ranking selection."""

    def test_probabilities_for_default_pressure(self):
        """mu=20, s=1.5: 0.025 for the worst, 0.075 for the best."""
        p = linear_ranking_probabilities(20, 1.5)

        assert p[0] == pytest.approx(0.025)
        assert p[-1] == pytest.approx(0.075)
        assert p[-1] / p[0] == pytest.approx(3.0)
        assert p.sum() == pytest.approx(1.0)

    def test_uniform_without_pressure(self):
        """s=1 degenerates to uniform selection."""
        assert np.allclose(linear_ranking_probabilities(7, 1.0), 1 / 7)

    @pytest.mark.parametrize("s", [0.5, 2.5])
    def test_pressure_out_of_range(self, s):
        """Pressure must lie in [1, 2]."""
        with pytest.raises(ValueError):
            linear_ranking_probabilities(10, s)

    def test_rank_order_and_ties(self, small_wm):
        """Worst first; among equal fitness the older individual comes first."""
        base = Individual.from_perm(small_wm, np.arange(small_wm.size), birth=5)
        twin = Individual.from_perm(small_wm, np.arange(small_wm.size), birth=2)
        better = Individual(base.perm, base.white_mask, 0.1, birth=0)

        ranked = rank_population([better, base, twin])
        assert ranked == [twin, base, better]

    def test_empirical_distribution(self, small_wm):
        """10^5 draws follow the ranking probabilities per rank."""
        population = [
            Individual(np.arange(small_wm.size), np.zeros(small_wm.size, dtype=bool), 1.0 - i / 20, birth=i)
            for i in range(20)
        ]
        ranked = rank_population(population)
        rng = np.random.default_rng(7)
        draws = 100_000

        index = {id(ind): i for i, ind in enumerate(ranked)}
        counts = np.zeros(20)
        for _ in range(draws):
            counts[index[id(select_parent(ranked, 1.5, rng))]] += 1

        expected = linear_ranking_probabilities(20, 1.5)
        sigma = np.sqrt(draws * expected * (1 - expected))
        assert np.all(np.abs(counts - draws * expected) <= 4 * sigma)


class TestCrossoverX:
    """Test the white-set crossover."""

    def test_identical_parents(self, small_wm, rng):
        """Equal white sets reproduce themselves for any r."""
        parent = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
        for r in (0.5, 0.75, 1.0):
            child = crossover_x(small_wm, parent, parent, rng, r=r)
            assert child.white_set.tolist() == parent.white_set.tolist()

    def test_structure(self, rng):
        """Child keeps k whites drawn from S1 and S2."""
        s1 = np.array([0, 1, 2, 3])
        s2 = np.array([2, 3, 4, 5])
        for _ in range(100):
            s, child = sample_white_set(s1, s2, 16, rng, 0.5)
            assert s.size == 2
            assert set(s.tolist()) <= set(s1.tolist())
            assert child.size == 4
            assert set(child.tolist()) <= {0, 1, 2, 3, 4, 5}

    def test_equal_sets_stay_inside(self, rng):
        """With S1 == S2 the child never leaves the common set."""
        s1 = np.array([0, 1, 2, 3])
        for r in (0.5, 0.8, 1.0):
            _, child = sample_white_set(s1, s1.copy(), 8, rng, r)
            assert child.tolist() == [0, 1, 2, 3]

    def test_subset_frequencies(self):
        """Each element of S1 lands in S with frequency floor(k r) / k."""
        rng = np.random.default_rng(3)
        s1 = np.array([0, 1, 2, 3, 4])
        s2 = np.array([5, 6, 7, 8, 9])
        trials = 10_000
        counts = np.zeros(5)
        for _ in range(trials):
            s, _ = sample_white_set(s1, s2, 20, rng, 0.6)
            counts[s] += 1

        p = math.floor(5 * 0.6) / 5
        sigma = math.sqrt(trials * p * (1 - p))
        assert np.all(np.abs(counts - trials * p) <= 4 * sigma)

    def test_reconstructed_permutation(self, small_wm):
        """The canonical permutation realises the requested white set."""
        target = np.arange(small_wm.white_count)
        perm = perm_for_white_set(small_wm, target)

        assert _is_permutation(perm, small_wm.size)
        assert apply_permutation(small_wm, perm).white_positions.tolist() == target.tolist()

    def test_different_k_rejected(self, small_wm, sparse_wm, rng):
        """Parents over different marks cannot be combined."""
        a = Individual.from_perm(small_wm, np.arange(small_wm.size))
        b = Individual.from_perm(sparse_wm, np.arange(sparse_wm.size))
        with pytest.raises(DimensionMismatchError):
            crossover_x(small_wm, a, b, rng)


class TestClassicalCrossovers:
    """Test OX, PMX, CX and ER."""

    def test_order_crossover_example(self):
        """OX keeps the segment and fills from the other parent after the second cut."""
        p1 = np.arange(6)
        p2 = np.arange(6)[::-1]
        assert order_crossover(p1, p2, 2, 4).tolist() == [5, 4, 2, 3, 1, 0]

    def test_pmx_example(self):
        """PMX places displaced genes through the mapping chain."""
        p1 = np.arange(6)
        p2 = np.array([2, 4, 0, 1, 5, 3])
        assert partially_mapped_crossover(p1, p2, 1, 3).tolist() == [0, 1, 2, 4, 5, 3]

    def test_cycle_crossover_example(self):
        """Two cycles: the second one is taken from the other parent."""
        child1, child2 = cycle_crossover(np.array([0, 1, 2, 3]), np.array([1, 0, 3, 2]))
        assert child1.tolist() == [0, 1, 3, 2]
        assert child2.tolist() == [1, 0, 2, 3]

    @pytest.mark.parametrize("kind", [CrossoverKind.OX, CrossoverKind.PMX, CrossoverKind.CX])
    def test_identical_parents(self, kind, small_wm, rng):
        """Equal parents give equal children."""
        parent = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
        c1, c2 = crossover_classical(kind, parent, parent, rng, small_wm)
        assert c1.perm.tolist() == parent.perm.tolist()
        assert c2.perm.tolist() == parent.perm.tolist()

    @pytest.mark.parametrize("kind", [CrossoverKind.OX, CrossoverKind.PMX, CrossoverKind.CX, CrossoverKind.ER])
    def test_children_are_permutations(self, kind, small_wm, rng):
        """Every operator yields valid permutations with k whites."""
        for _ in range(25):
            p1 = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
            p2 = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
            for child in crossover_classical(kind, p1, p2, rng, small_wm):
                assert _is_permutation(child.perm, small_wm.size)
                assert child.white_set.size == small_wm.white_count

    def test_edge_recombination_uses_parent_edges(self, rng):
        """With identical parents every child edge is a parent edge."""
        parent = rng.permutation(12)
        child = edge_recombination(parent, parent, rng)

        edges = {frozenset((int(a), int(b))) for a, b in zip(parent, np.roll(parent, -1))}
        assert _is_permutation(child, 12)
        assert all(frozenset((int(a), int(b))) in edges for a, b in zip(child[:-1], child[1:]))

    def test_er_duplicates_single_child(self, small_wm, rng):
        """ER fills both offspring slots with one child."""
        p1 = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
        p2 = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
        c1, c2 = crossover_classical(CrossoverKind.ER, p1, p2, rng, small_wm)
        assert c1.perm.tolist() == c2.perm.tolist()


class TestMutations:
    """Test the four mutations."""

    def test_swap(self):
        """SwM exchanges two positions."""
        assert swap_positions(np.array([0, 1, 2]), 0, 2).tolist() == [2, 1, 0]

    def test_inversion(self):
        """InvM reverses an inclusive segment."""
        assert invert_segment(np.array([0, 1, 2, 3, 4]), 1, 3).tolist() == [0, 3, 2, 1, 4]

    def test_insertion(self):
        """InsM removes an element and reinserts it elsewhere."""
        assert insert_mutation(np.array([0, 1, 2, 3]), 0, 2).tolist() == [1, 2, 0, 3]

    def test_scramble_keeps_outside(self, rng):
        """ScM only touches the segment."""
        out = scramble_segment(np.arange(10), 3, 6, rng)
        assert out[:3].tolist() == [0, 1, 2]
        assert out[7:].tolist() == [7, 8, 9]
        assert sorted(out[3:7].tolist()) == [3, 4, 5, 6]

    @pytest.mark.parametrize("kind", list(MutationKind))
    def test_mutants_are_permutations(self, kind, small_wm, rng):
        """Every mutation keeps the multiset of elements."""
        parent = Individual.from_perm(small_wm, rng.permutation(small_wm.size))
        for _ in range(25):
            child = mutate(kind, parent, rng, small_wm)
            assert _is_permutation(child.perm, small_wm.size)
            assert child.white_set.size == small_wm.white_count
