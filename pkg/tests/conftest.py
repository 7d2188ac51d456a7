import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fsmac.channel import FsMacChannel, bundled_path, load_channel  # noqa: E402


def random_channel(rng: np.random.Generator, n_s=2, n_sa=2, n_sb=2, n_xa=2, n_xb=2, n_y=2,
                   concentration: float = 1.0) -> FsMacChannel:
    def kernel(*shape):
        return rng.dirichlet(np.full(shape[-1], concentration), size=shape[:-1])

    return FsMacChannel(rng.dirichlet(np.ones(n_s)), kernel(n_s, n_sa), kernel(n_s, n_sb),
                        kernel(n_xa, n_xb, n_s, n_y))


def tiny_channel(rng: np.random.Generator) -> FsMacChannel:
    """All alphabets at most 2 and strategy spaces at most 4."""
    dims = {k: int(rng.integers(1, 3)) for k in ("n_s", "n_sa", "n_sb", "n_xa", "n_xb")}
    return random_channel(rng, n_y=2, **dims)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def xor_channel():
    return load_channel(bundled_path("xor_mac"))


@pytest.fixture(scope="session")
def modulo_spec():
    return load_channel(bundled_path("modulo_q2"))


@pytest.fixture(scope="session")
def multiplier_spec():
    return load_channel(bundled_path("binary_multiplier"))
