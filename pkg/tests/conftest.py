"""Shared frequency tables for the paired_gof tests.

The three tables are the worked examples shipped under config/datasets.
"""
from __future__ import annotations

from pathlib import Path

import pytest

from paired_gof.core.data import FrequencyTable

DATASETS = Path(__file__).resolve().parent.parent / "config" / "datasets"


@pytest.fixture
def ome_table() -> FrequencyTable:
    """Two antibiotic arms, bilateral and unilateral counts."""
    return FrequencyTable.from_counts(
        [(21, 9, 14, 38, 24), (13, 3, 15, 27, 39)],
        labels=["Cefaclor", "Amoxicillin"],
    )


@pytest.fixture
def myopia_table() -> FrequencyTable:
    """Three small treatment arms."""
    return FrequencyTable.from_counts(
        [(2, 1, 7, 1, 2), (3, 1, 1, 1, 0), (3, 4, 6, 0, 1)],
        labels=["Q", "Y", "W"],
    )


@pytest.fixture
def rp_table() -> FrequencyTable:
    """Four genetic types, bilateral subjects only."""
    return FrequencyTable.from_counts(
        [(15, 6, 7), (7, 5, 9), (3, 2, 14), (67, 24, 57)],
        labels=["DOM", "AR", "SL", "ISO"],
    )


@pytest.fixture
def datasets_dir() -> Path:
    return DATASETS
