"""
Configuration module for the engulfing toolkit.
Reads from environment variables with sensible defaults.
"""
import math
import os
from pathlib import Path
from typing import List, Optional

from .helpers.error_handlers import handle_validation_error
from .models.config_models import RefineConfig, SamplerConfig


def _env_path(name: str) -> Optional[Path]:
    value = os.getenv(name)
    return Path(value) if value else None


class Config:
    """Base configuration class"""

    # Logging configuration
    LOG_LEVEL = os.getenv('ENGULF_LOG_LEVEL', 'INFO')
    LOG_FILE = _env_path('ENGULF_LOG_FILE')
    LOG_JSON = os.getenv('ENGULF_LOG_JSON', 'false').lower() == 'true'

    # Sampling
    SEED = int(os.getenv('ENGULF_SEED', '0'))
    BOX = float(os.getenv('ENGULF_BOX', '10.0'))
    SAMPLES = int(os.getenv('ENGULF_SAMPLES', '10000'))
    T_MIN = float(os.getenv('ENGULF_T_MIN', '1e-6'))
    T_MAX = float(os.getenv('ENGULF_T_MAX', '1e3'))
    R_CAP = float(os.getenv('ENGULF_R_CAP', '1e12'))

    # Constant estimation
    GRID = int(os.getenv('ENGULF_GRID', '400'))
    REFINE_ROUNDS = int(os.getenv('ENGULF_REFINE_ROUNDS', '40'))

    # Report settings
    TRIAL_K = 100.0
    EXP_FAMILY_HEIGHTS = (1.0, 2.0, 5.0, 10.0, 15.0, 20.0)

    @classmethod
    @handle_validation_error
    def sampler_config(cls, **overrides) -> SamplerConfig:
        """Validated sampler settings; keyword overrides win over the environment."""
        values = {
            'box': cls.BOX,
            'samples': cls.SAMPLES,
            't_min': cls.T_MIN,
            't_max': cls.T_MAX,
            'seed': cls.SEED,
            'r_cap': cls.R_CAP,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SamplerConfig(**values)

    @classmethod
    @handle_validation_error
    def refine_config(cls, **overrides) -> RefineConfig:
        values = {'grid': cls.GRID, 'rounds': cls.REFINE_ROUNDS}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RefineConfig(**values)

    @classmethod
    def validate_config(cls) -> List[str]:
        """Return warnings about settings that weaken the checks."""
        warnings = []
        if cls.T_MIN > 0 and cls.T_MAX > 0 and math.log10(cls.T_MAX / cls.T_MIN) < 3:
            warnings.append(f"Height range [{cls.T_MIN}, {cls.T_MAX}] spans fewer than three decades")
        if cls.SAMPLES < 1000:
            warnings.append(f"Only {cls.SAMPLES} samples per check; pass verdicts are weak evidence")
        if cls.GRID < 100:
            warnings.append(f"Estimation grid of {cls.GRID} points may miss the supremum")
        if cls.R_CAP < 1e6:
            warnings.append(f"Radius cap {cls.R_CAP} may classify slowly growing sections as unbounded")
        return warnings


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    SAMPLES = 2000
    GRID = 200


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name: Optional[str] = None) -> type:
    """Config class selected by name or by ENGULF_ENV."""
    name = config_name or os.getenv('ENGULF_ENV', 'default')
    return config.get(name, config['default'])
