import csv
import os
import pathlib

import pytest

from classmax import cubic, sweep

DATA = pathlib.Path(__file__).parent / "data"

WORKERS = min(2, os.cpu_count() or 1)


def load_rows(name: str) -> list[dict]:
    with open(DATA / name, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="session")
def data_rows():
    return load_rows


@pytest.fixture(scope="session")
def imag_triples():
    """(D, N, H) for all fundamental imaginary |D| <= 1.2e6."""
    return sweep.quad_triples("imaginary", 1, 1_200_000, workers=1)


@pytest.fixture(scope="session")
def real_triples():
    """(D, N, H+) for all fundamental real D <= 1e6."""
    return sweep.quad_triples("real", 2, 1_000_000, workers=WORKERS)


@pytest.fixture(scope="session")
def bundled_fixtures():
    return cubic.FixtureStore.bundled()
