"""Shared fixtures for the test suite"""

import pytest
import structlog

from src.config import build_config


@pytest.fixture(autouse=True)
def reset_structlog():
    """CLI tests configure structlog against CliRunner's streams; undo that after each test"""
    yield
    structlog.reset_defaults()


@pytest.fixture
def small_config():
    """Low-budget configuration for end-to-end runs"""
    return build_config({
        "M": 10,
        "max_subsize": 3,
        "dims": 2,
        "n_peaks": 3,
        "U_cf": 600,
        "n_environments": 4,
        "runs": 2,
        "base_seed": 7,
    })
