"""
Run settings - tolerances, seed, worker count and output location.

Values come from the dataclass defaults, then from the environment (a local
.env file is honoured through python-dotenv), then from explicit overrides.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Paths
BASE_DIR = Path(__file__).parent.parent
DEFAULT_OUTPUT_DIR = Path('output')

# Environment variables understood by load_settings
ENV_SEED = 'DUALKIT_SEED'
ENV_WORKERS = 'DUALKIT_WORKERS'
ENV_OUTPUT_DIR = 'DUALKIT_OUTPUT_DIR'


@dataclass(frozen=True)
class Settings:
    """Tolerances and run parameters shared by every module."""
    unitarity_tol: float = 1e-10
    rank_tol: float = 1e-12  # relative to the largest singular value
    classify_tol: float = 1e-8
    product_tol: float = 1e-8
    overlap_tol: float = 1e-8
    period_tol: float = 1e-8
    equality_tol: float = 1e-12
    ks_alpha: float = 1e-3
    support_threshold: float = 1e-6
    seed: int = 1
    workers: int = 1
    output_dir: Path = field(default=DEFAULT_OUTPUT_DIR)

    def to_dict(self) -> dict:
        """Serializable form, used for run_config.json sidecars."""
        data = asdict(self)
        data['output_dir'] = str(self.output_dir)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'Settings':
        """Rebuild settings from to_dict() output, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        if 'output_dir' in values:
            values['output_dir'] = Path(values['output_dir'])
        return cls(**values)

    def with_overrides(self, **overrides) -> 'Settings':
        """Copy with the non-None overrides applied."""
        clean = {k: v for k, v in overrides.items() if v is not None}
        if 'output_dir' in clean:
            clean['output_dir'] = Path(clean['output_dir'])
        return replace(self, **clean)


DEFAULT_SETTINGS = Settings()


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", name, raw)
        return None


def load_settings(env_file: Optional[Path] = None, **overrides) -> Settings:
    """
    Build the active settings.

    Args:
        env_file: Optional .env path; the default search of python-dotenv
            is used when omitted
        **overrides: Explicit values that win over the environment

    Returns:
        Settings instance
    """
    if env_file is not None:
        load_dotenv(env_file, override=False)
    else:
        load_dotenv(override=False)

    from_env = {
        'seed': _env_int(ENV_SEED),
        'workers': _env_int(ENV_WORKERS),
        'output_dir': os.environ.get(ENV_OUTPUT_DIR) or None,
    }
    settings = DEFAULT_SETTINGS.with_overrides(**from_env)
    settings = settings.with_overrides(**overrides)
    logger.debug("Active settings: %s", settings)
    return settings


def load_settings_file(path: Path) -> Settings:
    """Replay a saved run_config.json."""
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return Settings.from_dict(data.get('settings', data))
