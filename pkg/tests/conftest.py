import numpy as np
import pytest

from saftlab import params

MATRICES = {
    "fourier": params.fourier(),
    "frft45": params.fractional(np.pi / 4),
    "affine": params.ParameterMatrix(2, 1, 1, 1, 1, 1),
}


@pytest.fixture(params=sorted(MATRICES))
def matrix(request):
    return MATRICES[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
