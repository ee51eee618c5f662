"""
Basic tests for configuration system
"""
import json
import shutil
import tempfile
from pathlib import Path

import pytest
from pydantic import ValidationError

from teamata.core.config import AnalysisConfig, Config, OutputConfig


class TestConfig:
    """Test configuration management"""

    @pytest.fixture
    def temp_config_dir(self):
        """Create temporary config directory"""
        temp_dir = Path(tempfile.mkdtemp())
        yield temp_dir
        shutil.rmtree(temp_dir)

    def test_analysis_defaults(self, temp_config_dir):
        """Test analysis configuration defaults"""
        config = Config(temp_config_dir, use_env=False)
        assert config.analysis.feature_cap == 20
        assert config.analysis.max_workers == 1
        assert config.analysis.memoise_closures is True
        assert config.analysis.closure_cache_size == 1024
        assert config.analysis.default_mode == "strict"

    def test_output_and_logging_defaults(self, temp_config_dir):
        """Test output and logging defaults"""
        config = Config(temp_config_dir, use_env=False)
        assert config.output.rankdir == "LR"
        assert config.output.report_schema_version == 1
        assert config.logging.level == "WARNING"
        assert config.logging.json is False

    def test_config_save_and_load(self, temp_config_dir):
        """Test saving and loading configuration"""
        config = Config(temp_config_dir, use_env=False)

        config.analysis.feature_cap = 8
        config.output.rankdir = "TB"
        config.save()

        assert (temp_config_dir / "config.json").exists()
        config2 = Config(temp_config_dir, use_env=False)
        assert config2.analysis.feature_cap == 8
        assert config2.output.rankdir == "TB"

    def test_partial_file(self, temp_config_dir):
        """Sections missing from the file keep their defaults"""
        (temp_config_dir / "config.json").write_text(
            json.dumps({"analysis": {"max_workers": 3}}), encoding="utf-8"
        )
        config = Config(temp_config_dir, use_env=False)
        assert config.analysis.max_workers == 3
        assert config.analysis.feature_cap == 20
        assert config.output.rankdir == "LR"

    def test_environment_overrides_file(self, temp_config_dir, monkeypatch):
        """Environment variables win over the file and are coerced"""
        (temp_config_dir / "config.json").write_text(
            json.dumps({"analysis": {"feature_cap": 5}}), encoding="utf-8"
        )
        monkeypatch.setenv("TEAMATA_FEATURE_CAP", "12")
        monkeypatch.setenv("TEAMATA_LOG_LEVEL", "debug")
        config = Config(temp_config_dir)
        assert config.analysis.feature_cap == 12
        assert config.logging.level == "debug"

    def test_invalid_values_rejected(self):
        """Test field constraints"""
        with pytest.raises(ValidationError):
            AnalysisConfig(feature_cap=-1)
        with pytest.raises(ValidationError):
            AnalysisConfig(max_workers=0)
        assert OutputConfig(show_unreachable=True).show_unreachable is True
