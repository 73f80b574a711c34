from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def normalizer():
    from disclosure.normalize import Normalizer

    return Normalizer()


@pytest.fixture(scope="session")
def detector():
    from disclosure.detect import Detector

    return Detector()
