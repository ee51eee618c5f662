"""
Configuration Management System
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class AnalysisConfig(BaseModel):
    """Analysis configuration"""
    feature_cap: int = Field(default=20, ge=0)
    max_workers: int = Field(default=1, ge=1)  # 1 = sequential
    memoise_closures: bool = True
    closure_cache_size: int = Field(default=1024, ge=1)
    default_mode: str = "strict"  # strict or weak


class OutputConfig(BaseModel):
    """Output configuration"""
    rankdir: str = "LR"
    report_schema_version: int = 1
    show_unreachable: bool = False


class LoggingConfig(BaseModel):
    """Logging configuration"""
    level: str = "WARNING"
    format: str = "<level>{level: <8}</level> | {name}:{function} - {message}"
    json: bool = False


# environment variable -> (section, field)
ENV_OVERRIDES = {
    "TEAMATA_FEATURE_CAP": ("analysis", "feature_cap"),
    "TEAMATA_MAX_WORKERS": ("analysis", "max_workers"),
    "TEAMATA_CLOSURE_CACHE_SIZE": ("analysis", "closure_cache_size"),
    "TEAMATA_LOG_LEVEL": ("logging", "level"),
}


class Config:
    """Main configuration manager"""

    def __init__(self, config_dir: Optional[Path] = None, use_env: bool = True):
        if config_dir is None:
            config_dir = Path.home() / ".teamata"

        self.config_dir = Path(config_dir)
        self.config_file = self.config_dir / "config.json"
        self.use_env = use_env

        self._load_config()

    def _load_config(self):
        """Load configuration from file, then apply environment overrides"""
        if self.config_file.exists():
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config_data: Dict[str, Any] = json.load(f)
        else:
            config_data = {}

        if self.use_env:
            load_dotenv()
            for variable, (section, field) in ENV_OVERRIDES.items():
                value = os.environ.get(variable)
                if value is not None:
                    config_data.setdefault(section, {})[field] = value

        # pydantic coerces the string values coming from the environment
        self.analysis = AnalysisConfig(**config_data.get('analysis', {}))
        self.output = OutputConfig(**config_data.get('output', {}))
        self.logging = LoggingConfig(**config_data.get('logging', {}))

    def save(self):
        """Save configuration to file"""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        config_data = {
            'analysis': self.analysis.model_dump(),
            'output': self.output.model_dump(),
            'logging': self.logging.model_dump(),
        }

        with open(self.config_file, 'w', encoding='utf-8') as f:
            json.dump(config_data, f, indent=2, ensure_ascii=False)


# Global config instance
config = Config()
