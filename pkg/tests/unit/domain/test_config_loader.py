"""Tests for the configuration loader."""

from unittest.mock import patch

import pytest

from soapfilm.domain.config import MergePolicy, Ordering, RelaxObjective
from soapfilm.domain.config_loader import ENV_VARIABLES, load_solve_config

CLEAN_ENV = {name: "" for name in ENV_VARIABLES}


@pytest.mark.unit
class TestLoadSolveConfig:
    """Tests for load_solve_config."""

    def test_defaults_without_environment(self) -> None:
        """Without variables or overrides the defaults should be used."""
        # Given: no SOAPFILM_ variables and no .env file
        with patch.dict("os.environ", CLEAN_ENV):
            with patch("soapfilm.domain.config_loader.load_dotenv"):
                # When: loading
                config = load_solve_config()

        # Then: defaults apply
        assert config.angle_tolerance_fraction == 0.022
        assert config.ordering is Ordering.INPUT_ORDER

    def test_reads_environment(self) -> None:
        """Variables should set the matching fields."""
        # Given: environment values for several fields
        env = {
            **CLEAN_ENV,
            "SOAPFILM_TOLERANCE": "0.05",
            "SOAPFILM_ORDERING": "ACUTEST",
            "SOAPFILM_MERGE_POLICY": "adopt",
            "SOAPFILM_RELAX_OBJECTIVE": "weighted",
            "SOAPFILM_TILT_DEGREES": "0",
        }
        with patch.dict("os.environ", env):
            with patch("soapfilm.domain.config_loader.load_dotenv"):
                # When: loading
                config = load_solve_config()

        # Then: every value is parsed
        assert config.angle_tolerance_fraction == 0.05
        assert config.ordering is Ordering.ACUTEST_FIRST
        assert config.merge_policy is MergePolicy.TERMINAL_ADOPTS_STEINER_WEIGHT
        assert config.relax_objective is RelaxObjective.WEIGHTED
        assert config.tilt_degrees == 0.0

    def test_overrides_win_over_environment(self) -> None:
        """Explicit overrides should take precedence; None overrides are ignored."""
        env = {**CLEAN_ENV, "SOAPFILM_TOLERANCE": "0.05", "SOAPFILM_TILT_DEGREES": "2"}
        with patch.dict("os.environ", env):
            with patch("soapfilm.domain.config_loader.load_dotenv"):
                config = load_solve_config(angle_tolerance_fraction=0.01, tilt_degrees=None)

        assert config.angle_tolerance_fraction == 0.01
        assert config.tilt_degrees == 2.0

    def test_invalid_environment_value_raises(self) -> None:
        """An unparsable value should name the variable."""
        env = {**CLEAN_ENV, "SOAPFILM_ORDERING": "random"}
        with patch.dict("os.environ", env):
            with patch("soapfilm.domain.config_loader.load_dotenv"):
                with pytest.raises(ValueError, match="SOAPFILM_ORDERING"):
                    load_solve_config()

    def test_out_of_range_environment_value_raises(self) -> None:
        """A parsable but invalid value should fail validation."""
        env = {**CLEAN_ENV, "SOAPFILM_TOLERANCE": "1.5"}
        with patch.dict("os.environ", env):
            with patch("soapfilm.domain.config_loader.load_dotenv"):
                with pytest.raises(ValueError, match="angle_tolerance_fraction"):
                    load_solve_config()

    def test_loads_dotenv(self) -> None:
        """load_solve_config should read a .env file first."""
        with patch.dict("os.environ", CLEAN_ENV):
            with patch("soapfilm.domain.config_loader.load_dotenv") as mock_load:
                load_solve_config()

        mock_load.assert_called_once()
