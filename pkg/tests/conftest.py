from pathlib import Path

import pytest

from doudizhu import movegen
from doudizhu.engine import record_from_text

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def catalog():
    return movegen.enumerate_all_moves()


@pytest.fixture(scope="session")
def reference_record():
    return record_from_text((DATA / "reference_game.txt").read_text())


@pytest.fixture(scope="session")
def trained_encoder(catalog):
    """One pretrained group auto-encoder shared across the suite."""
    from doudizhu.features import pretrain_autoencoder

    return pretrain_autoencoder(catalog, rng=0, epochs=120)
