import pytest

from src import catalog
from src.config import Settings
from src.linalg import RngStream, dense_swap


@pytest.fixture
def settings(tmp_path):
    return Settings(output_dir=tmp_path)


@pytest.fixture
def rng():
    return RngStream(1234)


@pytest.fixture
def swap2():
    return dense_swap(2)


@pytest.fixture
def cnot():
    return catalog.named_gate('CNOT')


@pytest.fixture
def p9():
    return catalog.named_gate('P9')


@pytest.fixture
def p16():
    return catalog.named_gate('P16')


@pytest.fixture(autouse=True)
def _isolate_env(monkeypatch):
    for name in ('DUALKIT_SEED', 'DUALKIT_WORKERS', 'DUALKIT_OUTPUT_DIR'):
        monkeypatch.delenv(name, raising=False)
