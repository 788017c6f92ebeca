"""
Search configuration read from the environment.

Command-line flags and API fields override these per call.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import environ

logger = logging.getLogger(__name__)

env = environ.Env(
    TILING_NODE_BUDGET=(int, 10_000_000),
    TILING_ALPHA=(str, '1/64'),
    TILING_DETECT_ROUNDS=(int, 20),
    TILING_RANDOM_RETRY_CAP=(int, 20),
    TILING_SIDON_STEP_LIMIT=(int, 2_000_000),
    TILING_STAR_EXACT_LIMIT=(int, 24),
    TILING_BALANCE_CANDIDATES=(int, 400),
)


def parse_alpha(value) -> Fraction:
    """Parse α from '1/64', '0.125' or a number; must lie in (0, 1)."""
    alpha = Fraction(str(value).strip()) if not isinstance(value, Fraction) else value
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {value}")
    return alpha


@dataclass(frozen=True)
class SearchConfig:
    node_budget: int
    alpha: Fraction
    detect_rounds: int
    random_retry_cap: int
    sidon_step_limit: int
    star_exact_limit: int
    balance_candidates: int

    @classmethod
    def from_env(cls) -> 'SearchConfig':
        return cls(
            node_budget=env('TILING_NODE_BUDGET'),
            alpha=parse_alpha(env('TILING_ALPHA')),
            detect_rounds=env('TILING_DETECT_ROUNDS'),
            random_retry_cap=env('TILING_RANDOM_RETRY_CAP'),
            sidon_step_limit=env('TILING_SIDON_STEP_LIMIT'),
            star_exact_limit=env('TILING_STAR_EXACT_LIMIT'),
            balance_candidates=env('TILING_BALANCE_CANDIDATES'),
        )


# Singleton instance
_search_config = None


def get_search_config() -> SearchConfig:
    """
    Get or create the singleton search configuration.

    Returns:
        SearchConfig built from the environment
    """
    global _search_config
    if _search_config is None:
        _search_config = SearchConfig.from_env()
        logger.debug(f"Search configuration loaded: {_search_config}")
    return _search_config


def reset_search_config() -> None:
    """Drop the cached configuration so the next access re-reads the environment."""
    global _search_config
    _search_config = None
