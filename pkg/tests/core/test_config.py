"""Tests for config module."""

import pytest
from pydantic import ValidationError

from pseudolab.config import (
    FAMILIES,
    BeamConfig,
    CarlemanConfig,
    ExperimentConfig,
    HUMConfig,
    RegionConfig,
    RuntimeSettings,
    TimeConfig,
    WeightsConfig,
    get_runtime_settings,
    reset_runtime_settings,
)


class TestRuntimeSettings:
    """Tests for settings read from the environment."""

    def test_defaults(self):
        settings = RuntimeSettings.from_env()

        assert settings.threads >= 1
        assert settings.log_level == "INFO"

    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("LAB_THREADS", "3")
        monkeypatch.setenv("LAB_LOG_LEVEL", "debug")

        settings = RuntimeSettings.from_env()

        assert settings.threads == 3
        assert settings.log_level == "DEBUG"

    def test_threads_floor_at_one(self, monkeypatch):
        monkeypatch.setenv("LAB_THREADS", "0")

        assert RuntimeSettings.from_env().threads == 1

    def test_unknown_level_rejected(self, monkeypatch):
        monkeypatch.setenv("LAB_LOG_LEVEL", "chatty")

        with pytest.raises(ValidationError, match="unknown log level"):
            RuntimeSettings.from_env()

    def test_cached_until_reset(self, monkeypatch):
        first = get_runtime_settings()
        monkeypatch.setenv("LAB_THREADS", "2")

        assert get_runtime_settings() is first

        reset_runtime_settings()
        assert get_runtime_settings().threads == 2


class TestExperimentConfig:
    """Tests for the run configuration."""

    def test_defaults(self):
        config = ExperimentConfig()

        assert config.families == list(FAMILIES)
        assert config.grid.build().shape == (200,)
        assert config.time.build().steps == 400
        assert config.output_dir == "results"

    def test_json_round_trip(self, tmp_path):
        config = ExperimentConfig(seed=5, time=TimeConfig(horizon=2.0, steps=50), families=["hum", "carleman"])
        path = tmp_path / "config.json"
        path.write_text(config.to_json())

        assert ExperimentConfig.from_json_file(path) == config

    def test_partial_document(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"grid": {"n": 40}, "families": ["flow-check"]}')

        config = ExperimentConfig.from_json_file(path)

        assert config.grid.n == 40
        assert config.families == ["flow-check"]
        assert config.hum == HUMConfig()

    def test_tau_margin_below_half_horizon(self):
        with pytest.raises(ValidationError, match="tau_margin"):
            ExperimentConfig(time=TimeConfig(horizon=0.1), weights=WeightsConfig(tau_margin=0.2))

    def test_empty_families_rejected(self):
        with pytest.raises(ValidationError, match="families must not be empty"):
            ExperimentConfig(families=[])

    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(families=["teleport"])


class TestSectionValidators:
    """Tests for the per-section validators."""

    def test_betas_must_decrease(self):
        with pytest.raises(ValidationError, match="strictly decreasing"):
            HUMConfig(betas=[1e-6, 1e-4])

    def test_betas_positive(self):
        with pytest.raises(ValidationError, match="betas must be positive"):
            HUMConfig(betas=[1e-4, 0.0])

    def test_beam_sweep_may_run_either_way(self):
        assert BeamConfig(hs=[0.01, 0.02, 0.04, 0.08]).hs[0] == 0.01

    def test_beam_sweep_must_be_monotone(self):
        with pytest.raises(ValidationError, match="strictly monotone"):
            BeamConfig(epsilons=[0.02, 0.01, 0.01, 0.005])

    def test_default_bbm_ball_clears_region_and_boundary(self):
        beams = BeamConfig()

        assert beams.bbm_x0 - beams.bbm_delta > beams.region[1]
        assert beams.bbm_x0 + beams.bbm_delta < 1.0
        assert beams.bbm_phase_norm == "bilinear"
        assert beams.bbm_n > beams.n

    def test_bbm_plateau_range(self):
        with pytest.raises(ValidationError, match="bbm_plateau"):
            BeamConfig(bbm_plateau=1.0)

    def test_growth_bounds_positive(self):
        with pytest.raises(ValidationError, match="fixed_growth_min"):
            HUMConfig(fixed_growth_min=0.0)

    def test_lambda_scan_must_not_be_empty(self):
        with pytest.raises(ValidationError, match="must not be empty"):
            CarlemanConfig(lambda_scan=[])

    def test_lambda_scan_must_increase(self):
        with pytest.raises(ValidationError, match="strictly increasing"):
            CarlemanConfig(lambda_scan=[10.0, 5.0, 1.0])

    def test_margins_positive(self):
        with pytest.raises(ValidationError, match="margins must be positive"):
            RegionConfig(margins=(0.02, 0.0, 0.05, 0.05))

    def test_fixed_region(self):
        box = RegionConfig(fixed_region=(0.2, 0.6)).fixed()

        assert box.lower == (0.2,)
        assert box.upper == (0.6,)
