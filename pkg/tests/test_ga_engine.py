"""Tests for the steady-state GA and operator experiments."""
from itertools import combinations

import numpy as np
import pytest

from app.exceptions import GAConfigError
from app.ga.engine import SteadyStateGA, evolve, run_rng
from app.ga.experiment import (
    EXPERIMENT_COLUMNS,
    evolve_runs,
    experiment_frame,
    run_experiment,
    summarize_runs
)
from app.models.images import BinaryWatermark
from app.models.schemas import CrossoverKind, GAConfig, MutationKind, RunStats
from app.utils.synthetic import synthetic_watermark


class TestSteadyStateGA:
    """Test the evolution loop."""

    def test_elitism(self, small_wm):
        """Best NC never increases across generations."""
        _, stats = evolve(small_wm, GAConfig(generations=30, rng_seed=1))
        history = stats.per_generation_best

        assert len(history) == 31
        assert all(later <= earlier for earlier, later in zip(history, history[1:]))
        assert stats.nc_final <= stats.nc0
        assert history[stats.found_at] == stats.nc_final

    @pytest.mark.parametrize("crossover", list(CrossoverKind))
    def test_population_stays_distinct(self, crossover, small_wm):
        """No two individuals share a white set in any generation."""
        cfg = GAConfig(generations=15, crossover=crossover, mutation=MutationKind.SWM, rng_seed=5)
        ga = SteadyStateGA(small_wm, cfg)
        ga.initialize_population()

        for _ in range(cfg.generations):
            ga.step()
            signatures = [ind.signature for ind in ga.population]
            assert len(ga.population) == cfg.pop_size
            assert len(set(signatures)) == len(signatures)

    def test_determinism(self, small_wm):
        """Same seed, same result."""
        cfg = GAConfig(generations=20, rng_seed=99)
        best_a, stats_a = evolve(small_wm, cfg)
        best_b, stats_b = evolve(small_wm, cfg)

        assert stats_a == stats_b
        assert best_a.perm.tolist() == best_b.perm.tolist()

    def test_returned_best_matches_stats(self, small_wm):
        """The returned individual carries the final best fitness."""
        best, stats = evolve(small_wm, GAConfig(generations=10, rng_seed=3))
        assert best.fitness == stats.nc_final

    @pytest.mark.parametrize("bits", [np.zeros((4, 4)), np.ones((4, 4))])
    def test_degenerate_watermark(self, bits):
        """All-black or all-white marks have no search space."""
        with pytest.raises(GAConfigError):
            evolve(BinaryWatermark(bits=bits), GAConfig())

    def test_population_larger_than_search_space(self):
        """mu cannot exceed the number of distinct white sets."""
        wm = BinaryWatermark(bits=np.array([[1, 0], [0, 0]]))
        with pytest.raises(GAConfigError):
            evolve(wm, GAConfig(pop_size=5))

    def test_zero_generations(self, small_wm):
        """Without generations the result is the initial best."""
        _, stats = evolve(small_wm, GAConfig(generations=0))
        assert stats.nc0 == stats.nc_final
        assert stats.found_at == 0

    def test_brute_force_optimum(self):
        """On a 3x3 mark with k=2 the GA reaches the exhaustive minimum."""
        wm = BinaryWatermark(bits=np.array([[1, 0, 0], [0, 1, 0], [0, 0, 0]]))
        whites = set(wm.white_positions.tolist())
        optimum = min(len(whites & set(pair)) / 2 for pair in combinations(range(9), 2))

        _, stats = evolve(wm, GAConfig(generations=50, rng_seed=2012))
        assert optimum == 0.0
        assert stats.nc_final == optimum

    def test_sparse_watermark_improves(self, sparse_wm):
        """X + InvM lowers the best NC in most seeded runs."""
        cfg = GAConfig(crossover=CrossoverKind.X, mutation=MutationKind.INVM, rng_seed=2012)
        results = evolve_runs(sparse_wm, cfg, runs=10)

        improved = sum(stats.nc_final < stats.nc0 for _, stats in results)
        assert improved >= 8

    def test_dense_watermark_respects_bound(self, dense_wm):
        """Density 0.8 never goes below 0.75."""
        _, stats = evolve(dense_wm, GAConfig(rng_seed=4))
        assert stats.nc_final >= 0.75 - 1e-12


class TestRunStreams:
    """Test per-run random streams."""

    def test_streams_differ_per_run(self):
        """Different run indices give different streams."""
        assert run_rng(1, 0).integers(1 << 30) != run_rng(1, 1).integers(1 << 30)

    def test_streams_reproducible(self):
        """Same (seed, run) gives the same stream."""
        assert run_rng(5, 3).integers(1 << 30) == run_rng(5, 3).integers(1 << 30)


class TestExperiment:
    """Test operator experiments."""

    def test_single_run_averages(self, small_wm):
        """With one run the Av columns equal the NC columns."""
        rows = run_experiment(
            small_wm, [CrossoverKind.X], [MutationKind.INVM], runs=1, cfg=GAConfig(generations=5)
        )
        assert len(rows) == 1
        assert rows[0].av0 == rows[0].nc0
        assert rows[0].av_final == rows[0].nc_final

    def test_full_grid_shape(self):
        """Five crossovers by four mutations give twenty rows."""
        wm = synthetic_watermark(6, 0.3, seed=1)
        rows = run_experiment(
            wm, list(CrossoverKind), list(MutationKind), runs=1, cfg=GAConfig(generations=3)
        )
        assert len(rows) == 20
        assert {(r.crossover, r.mutation) for r in rows} == {
            (c, m) for c in CrossoverKind for m in MutationKind
        }

    def test_summary(self):
        """NC columns take the best run, Av columns the mean."""
        stats = [
            RunStats(nc0=0.3, nc_final=0.2, found_at=4),
            RunStats(nc0=0.5, nc_final=0.1, found_at=6),
        ]
        row = summarize_runs(CrossoverKind.OX, MutationKind.SCM, stats)

        assert row.nc0 == 0.3
        assert row.av0 == pytest.approx(0.4)
        assert row.nc_final == 0.1
        assert row.av_final == pytest.approx(0.15)
        assert row.iter == 5.0

    def test_worker_count_does_not_change_results(self, small_wm):
        """Process-pool runs match sequential runs."""
        cfg = GAConfig(generations=5, rng_seed=8)
        sequential = evolve_runs(small_wm, cfg, runs=3, max_workers=1)
        parallel = evolve_runs(small_wm, cfg, runs=3, max_workers=2)

        assert [s for _, s in sequential] == [s for _, s in parallel]

    def test_frame_columns(self):
        """CSV frame has the fixed header and compact numbers."""
        stats = [RunStats(nc0=0.5, nc_final=0.25, found_at=2)]
        frame = experiment_frame([summarize_runs(CrossoverKind.X, MutationKind.INVM, stats)])

        assert list(frame.columns) == EXPERIMENT_COLUMNS
        assert frame.iloc[0].tolist() == ["X", "InvM", "0.5", "0.5", "0.25", "0.25", "2"]
