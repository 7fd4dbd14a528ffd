import sys
from pathlib import Path

import numpy as np
import pytest

from qlwave.spectral import SpectralField, omega_weights

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def hermitian_field(rng, degree, scale=1.0, decay=0.0) -> SpectralField:
    """Random real field; decay > 0 damps high modes like w_j^-decay."""
    c = rng.standard_normal(2 * degree + 1) + 1j * rng.standard_normal(2 * degree + 1)
    c = 0.5 * (c + np.conj(c[::-1]))
    if decay:
        c = c * omega_weights(degree) ** (-decay)
    return SpectralField(scale * c)
