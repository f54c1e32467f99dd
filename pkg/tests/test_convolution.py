import numpy as np
import pytest

from saftlab import params
from saftlab.convolution import affine_convolve, convolution_prefactor, convolution_theorem_check
from saftlab.exceptions import DegenerateBError, GridMismatchError
from saftlab.params import ParameterMatrix
from saftlab.saft import relative_rms
from saftlab.signals import SampledSignal


def _gauss(centre, width, t0=-16.0, dt=1 / 32, n=1024):
    return SampledSignal.from_function(lambda t: np.exp(-0.5 * ((t - centre) / width) ** 2), t0, dt, n)


def test_fourier_case_is_scaled_ordinary_convolution():
    f = _gauss(0, 1)
    h = affine_convolve(f, f, params.fourier()).signal
    ref = (2j * np.pi) ** -0.5 * np.sqrt(np.pi) * np.exp(-0.25 * f.t**2)
    np.testing.assert_allclose(h.samples, ref, atol=1e-12)


def test_direct_and_fft_agree(matrix):
    f, g = _gauss(1, 1), _gauss(-0.5, 0.7)
    d = affine_convolve(f, g, matrix, method="direct").signal.samples
    q = affine_convolve(f, g, matrix, method="fft").signal.samples
    assert relative_rms(q, d) < 1e-12


def test_commutative(matrix):
    f, g = _gauss(1, 1), _gauss(-0.5, 0.7)
    fg = affine_convolve(f, g, matrix, method="fft").signal.samples
    gf = affine_convolve(g, f, matrix, method="fft").signal.samples
    assert relative_rms(fg, gf) < 1e-12


def test_chirp_kernel_by_brute_force():
    m = ParameterMatrix(2, 1, 1, 1, 1, 1)
    f, g = _gauss(0.5, 1), _gauss(0, 0.8)
    h = affine_convolve(f, g, m).signal
    i = 600
    t = h.t[i]
    tau = f.t
    gval = np.exp(-0.5 * ((t - tau) / 0.8) ** 2)
    ref = convolution_prefactor(m) * f.dt * np.sum(f.samples * gval * np.exp(-1j * m.A * tau * (t - tau) / m.B))
    assert h.samples[i] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("method", ["direct", "fft"])
def test_theorem(matrix, method):
    f, g = _gauss(1, 1), _gauss(-0.5, 0.7)
    res = convolution_theorem_check(f, g, matrix, method=method)
    assert res.kind == "relative"
    assert float(res) < 1e-10


def test_theorem_negative_b():
    m = ParameterMatrix(1, -2, 0.5, 0, 0.4, -0.3)
    res = convolution_theorem_check(_gauss(1, 1), _gauss(0, 0.7), m, method="fft")
    assert float(res) < 1e-10


def test_grid_errors():
    f = _gauss(0, 1)
    with pytest.raises(GridMismatchError):
        affine_convolve(f, _gauss(0, 1, dt=1 / 16), params.fourier())
    with pytest.raises(GridMismatchError):
        affine_convolve(f, _gauss(0, 1, t0=-16.01), params.fourier())
    with pytest.raises(GridMismatchError):
        convolution_theorem_check(f, _gauss(0, 1, n=512), params.fourier())
    with pytest.raises(DegenerateBError):
        affine_convolve(f, f, ParameterMatrix(1, 0, 0, 1))
    with pytest.raises(ValueError):
        affine_convolve(f, f, params.fourier(), method="nope")


def test_zero_input_gives_absolute_residual():
    z = _gauss(0, 1).with_samples(np.zeros(1024))
    res = convolution_theorem_check(z, _gauss(0, 1), params.fourier())
    assert res.kind == "absolute" and float(res) == 0.0
