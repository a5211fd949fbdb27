"""Tests for experiment tables, helpers and the acceptance harness."""
import json
import math
from unittest.mock import Mock, patch

import numpy as np
import pandas as pd
import pytest

from app.models.schemas import AttackSpec, GAConfig
from app.services.experiment_service import (
    default_attack_specs,
    experiment_service,
    ga_config_from_settings
)
from app.utils.formatting import format_number, write_csv
from app.utils.synthetic import COVER_HIGH, COVER_LOW, synthetic_cover, synthetic_watermark
from evaluation.dataset import ALL_TEST_CASES, get_test_case_by_id, get_test_cases_by_category
from evaluation.evaluate_system import EvaluationConfig, EvaluationRunner
from evaluation.generate_report import generate_full_report
from evaluation.metrics_config import CriterionResult, calculate_aggregate_scores, finalize_result


@pytest.fixture(scope="module")
def small_inputs():
    """A 128x128 cover with one 16x16 mark."""
    return {"c": synthetic_cover(128, seed=1)}, {"w": synthetic_watermark(16, 0.3, seed=2)}


class TestFormatting:
    """Test number formatting and CSV output."""

    @pytest.mark.parametrize("value,text", [
        (1.0, "1"),
        (0.0, "0"),
        (0.1159, "0.1159"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        (np.float64(2.01), "2.01"),
    ])
    def test_format_number(self, value, text):
        """Integral floats drop the fraction, others keep the shortest form."""
        assert format_number(value) == text

    def test_write_csv_creates_directory(self, tmp_path):
        """Parent directories are created; no index column."""
        path = write_csv(pd.DataFrame({"a": ["1"], "b": ["x"]}), tmp_path / "sub" / "t.csv")
        assert path.read_text().splitlines() == ["a,b", "1,x"]


class TestSynthetic:
    """Test synthetic inputs."""

    def test_watermark_white_count(self):
        """Exactly round(density * m^2) white pixels."""
        wm = synthetic_watermark(64, 0.18, seed=2)
        assert wm.white_count == round(0.18 * 4096)

    @pytest.mark.parametrize("density,count", [(0.0, 1), (1.0, 15)])
    def test_watermark_never_degenerate(self, density, count):
        """Extreme densities are clamped into [1, m^2 - 1]."""
        assert synthetic_watermark(4, density, seed=0).white_count == count

    @pytest.mark.parametrize("side,density", [(1, 0.5), (8, -0.1), (8, 1.5)])
    def test_watermark_rejects_bad_input(self, side, density):
        """Side below 2 or density outside [0, 1] fails."""
        with pytest.raises(ValueError):
            synthetic_watermark(side, density, seed=0)

    def test_cover_range_and_determinism(self):
        """Cover stays inside [16, 239] and depends only on the seed."""
        cover = synthetic_cover(64, seed=3)
        assert cover.pixels.min() >= COVER_LOW
        assert cover.pixels.max() <= COVER_HIGH
        assert synthetic_cover(64, seed=3) == cover
        assert synthetic_cover(64, seed=4) != cover


class TestExperimentService:
    """Test the experiment tables."""

    def test_config_overrides(self):
        """None overrides keep the settings value."""
        cfg = ga_config_from_settings(seed=5, generations=None, pop_size=10)
        assert cfg.rng_seed == 5
        assert cfg.pop_size == 10
        assert cfg.generations == GAConfig().generations

    def test_default_attacks(self):
        """Two JPEG qualities, then Gaussian and salt-and-pepper."""
        specs = default_attack_specs(seed=3)
        assert [s.label for s in specs] == ["jpg90", "jpg80", "Gauss", "S&P"]
        assert specs[-1] == AttackSpec.salt_pepper(0.01, rng_seed=3)

    def test_operator_grid(self):
        """One row per operator pair with a watermark column in front."""
        frame = experiment_service.operator_grid(
            {"tiny": synthetic_watermark(6, 0.3, seed=1)},
            GAConfig(generations=2),
            runs=1
        )
        assert len(frame) == 20
        assert list(frame.columns)[:3] == ["watermark", "crossover", "mutation"]
        assert set(frame["watermark"]) == {"tiny"}

    def test_b_sweep(self, small_inputs):
        """Three rows per pair; PSNR does not grow with b."""
        covers, watermarks = small_inputs
        frame = experiment_service.b_sweep(covers, watermarks, b_values=[1.99, 2.0, 2.01])

        assert frame["b"].tolist() == ["1.99", "2", "2.01"]
        psnrs = frame["psnr"].astype(float).tolist()
        assert psnrs[0] >= psnrs[1] >= psnrs[2]
        assert frame["nc"].iloc[-1] == "1"

    def test_attacks(self, small_inputs):
        """Attack rows carry cover and watermark names."""
        covers, watermarks = small_inputs
        frame = experiment_service.attacks(covers, watermarks, seed=1)

        assert list(frame.columns) == ["cover", "watermark", "attack", "param", "psnr", "nc"]
        assert frame["attack"].tolist() == ["jpg90", "jpg80", "Gauss", "S&P"]

    def test_permuted_embedding(self, small_inputs):
        """With the key NC is 1; without it NC equals the GA fitness."""
        covers, watermarks = small_inputs
        frame = experiment_service.permuted_embedding(covers, watermarks, GAConfig(generations=10, rng_seed=4))
        row = frame.iloc[0]

        assert row["nc"] == "1"
        assert float(row["nc_without_key"]) == pytest.approx(float(row["ga_fitness"]))

    def test_empty_inputs(self):
        """No watermarks, empty tables with fixed headers."""
        assert experiment_service.operator_grid({}, GAConfig(), runs=1).empty
        assert experiment_service.attacks({}, {}).empty


class TestHarnessPieces:
    """Test the acceptance harness building blocks."""

    def test_catalog(self):
        """Ten scenarios with unique ids."""
        ids = [tc["id"] for tc in ALL_TEST_CASES]
        assert len(ids) == 10 == len(set(ids))
        assert get_test_case_by_id("crit_07")["name"] == "selection_distribution"
        assert len(get_test_cases_by_category("codec")) == 3
        with pytest.raises(ValueError):
            get_test_case_by_id("crit_99")

    def test_finalize_result(self):
        """A slow scenario fails on runtime even if every check passes."""
        case = {"id": "x", "name": "n", "category": "ga", "runtime_limit": 1.0}
        fast = finalize_result(case, {"a": True}, {}, 0.5)
        slow = finalize_result(case, {"a": True}, {}, 2.0)

        assert fast.passed
        assert not slow.passed
        assert slow.checks["runtime"] is False

    def test_empty_checks_fail(self):
        """A scenario without checks is not a pass."""
        case = {"id": "x", "name": "n", "category": "ga"}
        assert not finalize_result(case, {}, {}, 0.0).passed

    def test_aggregate(self):
        """Pass counts per category and overall."""
        results = [
            CriterionResult(test_id="a", name="a", category="ga", passed=True),
            CriterionResult(test_id="b", name="b", category="ga", passed=False),
            CriterionResult(test_id="c", name="c", category="codec", passed=True),
        ]
        stats = calculate_aggregate_scores(results)

        assert stats["overall"]["passed"] == 2
        assert stats["by_category"]["ga"]["pass_rate"] == 0.5
        assert calculate_aggregate_scores([]) == {}


class TestEvaluationRunner:
    """Test the runner on the fast scenarios."""

    @pytest.fixture
    def runner(self, tmp_path):
        return EvaluationRunner(EvaluationConfig(output_dir=str(tmp_path)))

    @pytest.mark.parametrize("test_id", ["crit_01", "crit_03", "crit_04", "crit_08", "crit_09"])
    def test_fast_scenarios_pass(self, runner, test_id):
        """Exactness, b monotonicity, guaranteed decoding, attack bands and the permutation key pass."""
        result = runner.run_case(get_test_case_by_id(test_id))
        assert result.passed, result.checks

    def test_gaussian_band_measured(self, runner):
        """The robustness scenario records the Gaussian NC at or above 0.95."""
        result = runner.run_case(get_test_case_by_id("crit_08"))

        assert result.checks["synthetic_gauss_nc"]
        assert result.measured["synthetic"]["Gauss"]["nc"] >= 0.95
        assert result.measured["gaussian_scale"] == "byte"

    def test_exhaustive_optimum_is_zero(self, runner):
        """The 3x3 oracle minimum is 0."""
        result = runner.run_case(get_test_case_by_id("crit_06"))
        assert result.checks["optimum_is_zero"]
        assert result.measured["optimum"] == 0.0

    def test_scenario_error_is_recorded(self, runner):
        """An exception becomes a failed result with the message."""
        broken = Mock(side_effect=RuntimeError("boom"))
        with patch.dict(runner.checkers, {"crit_01": broken}):
            result = runner.run_case(get_test_case_by_id("crit_01"))

        broken.assert_called_once()

        assert not result.passed
        assert result.error == "boom"

    def test_results_and_report(self, runner, tmp_path):
        """JSON results are written twice and render to markdown."""
        runner.config.category = "transform"
        results = runner.run_evaluation()

        latest = tmp_path / "evaluation_results_latest.json"
        assert latest.exists()
        assert len(list(tmp_path.glob("evaluation_results_*.json"))) == 2
        assert json.loads(latest.read_text(encoding="utf-8"))["aggregate_stats"]["overall"]["total_tests"] == 1

        report = generate_full_report(results)
        assert "# Hadamark Acceptance Report" in report
        assert "crit_01" in report
