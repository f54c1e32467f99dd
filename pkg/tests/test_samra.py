import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from saftlab import params, samra
from saftlab.exceptions import DegenerateBError, NotRefinableError, QMFError, TailNotConvergedError
from saftlab.params import ParameterMatrix
from saftlab.signals import SampledSignal

AFFINE = ParameterMatrix(2, 1, 1, 1, 1, 1)
S = 1 / np.sqrt(2)


def test_step_function_fourier_matches_quadrature():
    phi = samra.StepFunction([1.0, -0.5, 2.0], width=0.5, start=-0.25)
    t = np.linspace(-0.25, 1.25, 300001)[:-1] + 0.25e-5
    xi = np.array([0.0, 1.3, -4.0])
    num = 1.5 / 300000 * np.exp(-1j * np.outer(xi, t)) @ phi(t)
    np.testing.assert_allclose(phi.fourier(xi), num, atol=1e-9)


def test_bspline_values():
    hat = samra.BSpline(2)
    np.testing.assert_allclose(hat([0.0, 0.5, 1.0, 1.5, 2.0, 3.0]), [0, 0.5, 1, 0.5, 0, 0])
    assert samra.BSpline(1)(0.99) == 1 and samra.BSpline(1)(1.0) == 0
    with pytest.raises(ValueError):
        samra.BSpline(0)


def test_scaling_system_chirp():
    t = np.linspace(0, 1, 11)
    v = samra.scaling_system_values(samra.haar_scaling(), AFFINE, 1, 1, t)
    A, B, D, p = 2, 1, 1, 1
    ref = np.sqrt(2) * ((2 * t - 1 >= 0) & (2 * t - 1 < 1)) * np.exp(-0.5j * (A * t**2 + D * p**2 - A) / B)
    np.testing.assert_allclose(v, ref)


# -- Riesz -------------------------------------------------------------------------------


def test_haar_riesz_bounds_are_one(matrix):
    rep = samra.riesz_check(samra.haar_scaling(), matrix)
    assert abs(rep.a1 - 1) < 1e-10 and abs(rep.a2 - 1) < 1e-10
    assert rep.is_riesz


def test_hat_riesz_bounds():
    rep = samra.riesz_check(samra.BSpline(2), AFFINE)
    # G(xi) = (2 + cos xi)/3 for the hat function
    xi = samra.reduced_grid(AFFINE, 512)
    np.testing.assert_allclose(rep.values, (2 + np.cos(xi)) / 3, atol=1e-10)


def test_riesz_sum_matches_autocorrelation():
    xi = np.linspace(0, 2 * np.pi, 17)
    for phi in (samra.BSpline(2), samra.BSpline(3), samra.StepFunction([1.0, 0.5])):
        G, _ = samra.riesz_sum(phi, xi)
        np.testing.assert_allclose(G, samra.autocorrelation_symbol(phi, xi).real, atol=1e-8)


def test_counterexample_fails_riesz():
    rep = samra.riesz_check(samra.StepFunction([1.0, -1.0]), params.fourier())
    assert rep.a1 < 1e-8 and not rep.is_riesz
    assert rep.a2 == pytest.approx(4.0, rel=1e-6)


def test_fixed_truncation_option():
    rep = samra.riesz_check(samra.haar_scaling(), AFFINE, n_k=50)
    assert rep.n_k == 50 and abs(rep.a1 - 1) < 1e-2


def test_periodized_sum_convergence_error():
    with pytest.raises(TailNotConvergedError):
        samra.periodized_sum(lambda x: 1.0 / (1 + np.abs(x)) ** 0.5, np.array([0.1]), k_max=64)


def test_periodized_sum_known_series():
    # sum_k 1/(x + 2 pi k)^2 = 1/(4 sin^2(x/2))
    xi = np.array([0.5, 1.0, 2.5])
    val, _ = samra.periodized_sum(lambda x: 1 / x**2, xi, tol=1e-12)
    np.testing.assert_allclose(val, 1 / (4 * np.sin(xi / 2) ** 2), rtol=1e-9)


def test_orthonormalize_haar_is_identity():
    phi = samra.haar_scaling()
    assert samra.orthonormalize(phi, AFFINE) is phi


@pytest.mark.parametrize("order", [2, 3])
def test_orthonormalize_bspline(order):
    phi = samra.orthonormalize(samra.BSpline(order), AFFINE)
    assert isinstance(phi, samra.OrthonormalizedScaling)
    rep = samra.riesz_check(phi, AFFINE, n_omega=256)
    assert max(abs(rep.a1 - 1), abs(rep.a2 - 1)) < 1e-6


def test_orthonormalize_rejects_non_riesz():
    with pytest.raises(samra.RieszBoundError):
        samra.orthonormalize(samra.StepFunction([1.0, -1.0]), AFFINE)


def test_orthonormalized_fast_eval_matches_sum():
    phi = samra.orthonormalize(samra.BSpline(2), AFFINE)
    t = np.linspace(-30, 30, 2001)
    ref = sum(e * phi.base(t - n) for e, n in zip(phi.coeffs, phi.shifts))
    np.testing.assert_allclose(phi(t), ref, atol=1e-15)


# -- filters -----------------------------------------------------------------------------


def test_lowpass_haar_taps(matrix):
    c, k0 = samra.lowpass_filter(samra.haar_scaling(), matrix)
    assert k0 == 0 and c.size == 2
    np.testing.assert_allclose(c, S * np.exp(-0.5j * matrix.A * np.arange(2) ** 2 / matrix.B), atol=1e-12)


def test_classical_limit_reproduces_textbook_haar():
    fp = samra.build_filter_pair(samra.haar_scaling(), params.fourier())
    ref = samra.classical_haar_pair()
    np.testing.assert_allclose(fp.c, ref.c, atol=1e-12)
    np.testing.assert_allclose(fp.d, ref.d, atol=1e-12)
    assert (fp.k0, fp.kd0) == (0, 0)


def test_affine_haar_taps():
    fp = samra.build_filter_pair(samra.haar_scaling(), AFFINE)
    np.testing.assert_allclose(np.abs(fp.c), [S, S], atol=1e-12)
    np.testing.assert_allclose(np.abs(fp.d), [S, S], atol=1e-12)
    # d_mod = (-1)^(1-k) conj(c_mod[1-k]) exp(-ip/2B) with c_mod = (1, 1)/sqrt(2)
    np.testing.assert_allclose(fp.d_mod, S * np.array([-1, 1]) * np.exp(-0.5j), atol=1e-12)


def test_non_refinable_detected():
    with pytest.raises(NotRefinableError):
        samra.lowpass_filter(samra.StepFunction([1.0, 0.3]), AFFINE)


def test_hat_filter_after_orthonormalization():
    phi = samra.orthonormalize(samra.BSpline(2), AFFINE)
    c, k0, res = samra.lowpass_filter(phi, AFFINE, return_residual=True)
    assert res < 1e-10
    assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-10)


def test_filter_pair_json_roundtrip():
    fp = samra.build_filter_pair(samra.haar_scaling(), AFFINE)
    back = samra.FilterPair.from_dict(fp.to_dict())
    np.testing.assert_allclose(back.c_mod, fp.c_mod)
    np.testing.assert_allclose(back.d_mod, fp.d_mod)
    bad = fp.to_dict()
    bad["c"][1]["k"] = 5
    with pytest.raises(ValueError):
        samra.FilterPair.from_dict(bad)


def test_alternative_rule_differs_when_chirped():
    fp = samra.build_filter_pair(samra.haar_scaling(), AFFINE)
    d_alt, _ = samra.wavelet_filter_alt(fp.c, AFFINE, fp.k0)
    alt = samra.make_filter_pair(fp.c, d_alt, AFFINE, fp.k0, fp.kd0)
    assert samra.qmf_identity_check(alt).alternation > 1e-3
    c_f, k_f = samra.lowpass_filter(samra.haar_scaling(), params.fourier())
    d_f, _ = samra.wavelet_filter_alt(c_f, params.fourier(), k_f)
    np.testing.assert_allclose(d_f, samra.classical_haar_pair().d, atol=1e-12)


def test_qmf_identities(matrix):
    fp = samra.build_filter_pair(samra.haar_scaling(), matrix)
    rep = samra.qmf_identity_check(fp)
    assert rep.worst < 1e-12 and rep.alternation < 1e-12


def test_qmf_detects_bad_filters():
    fp = samra.make_filter_pair([1.0, 1.0], [-1.0, 1.0], params.fourier())
    assert samra.qmf_identity_check(fp).lowpass == pytest.approx(2.0)
    with pytest.raises(QMFError):
        samra.dwt(np.ones(8), fp, 1)


def test_biorthogonality(matrix):
    phi = samra.haar_scaling()
    fp = samra.build_filter_pair(phi, matrix)
    res = samra.biorthogonality_check(phi, samra.ModulatedWavelet(phi, fp), matrix)
    assert float(res) < 1e-10


def test_haar_wavelet_shape(matrix):
    _, wave, fp = samra.build_haar_system(matrix)
    t = wave.t
    inside = (t >= 0) & (t < 1)
    np.testing.assert_allclose(np.abs(wave.samples[inside]), 1.0, atol=1e-12)
    assert np.all(wave.samples[~inside] == 0)


def test_haar_wavelet_fourier_case_pointwise():
    _, wave, _ = samra.build_haar_system(params.fourier())
    np.testing.assert_allclose(wave.samples, samra.reference_haar_wavelet(wave.t), atol=1e-12)


def test_haar_wavelet_is_chirped():
    _, wave, _ = samra.build_haar_system(AFFINE)
    t = wave.t
    sel = (t >= 0.5) & (t < 1)
    ratio = wave.samples[sel] / np.exp(-0.5j * (AFFINE.A * t[sel] ** 2 + AFFINE.D * AFFINE.p**2) / AFFINE.B)
    assert np.ptp(ratio.real) < 1e-12 and np.ptp(ratio.imag) < 1e-12


def test_mra_needs_nonzero_b():
    with pytest.raises(DegenerateBError):
        samra.riesz_check(samra.haar_scaling(), ParameterMatrix(1, 0, 0, 1))


# -- DWT ---------------------------------------------------------------------------------


@pytest.mark.parametrize("levels", [1, 3, 5])
def test_perfect_reconstruction(matrix, rng, levels):
    fp = samra.build_filter_pair(samra.haar_scaling(), matrix)
    x = rng.standard_normal(1024) + 1j * rng.standard_normal(1024)
    p = samra.dwt(x, fp, levels)
    assert p.size == x.size and len(p.details) == levels
    assert np.max(np.abs(samra.idwt(p) - x)) < 1e-12
    energy = np.sum(np.abs(p.approx) ** 2) + sum(np.sum(np.abs(d) ** 2) for d in p.details)
    assert energy == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-12)


def test_classical_haar_dwt_values():
    x = np.array([4.0, 2.0, 5.0, 7.0])
    p = samra.dwt(x, samra.classical_haar_pair(), 1)
    np.testing.assert_allclose(p.approx, S * np.array([6.0, 12.0]))
    np.testing.assert_allclose(p.details[0], S * np.array([-2.0, 2.0]))


def test_perfect_reconstruction_longer_filter(rng):
    phi = samra.orthonormalize(samra.BSpline(2), AFFINE)
    fp = samra.build_filter_pair(phi, AFFINE)
    x = rng.standard_normal(512) + 0j
    assert np.max(np.abs(samra.idwt(samra.dwt(x, fp, 3)) - x)) < 1e-10


def test_dwt_shape_errors():
    fp = samra.classical_haar_pair()
    with pytest.raises(ValueError):
        samra.dwt(np.ones(12), fp, 3)
    with pytest.raises(ValueError):
        samra.dwt(np.ones(8), fp, 0)
    p = samra.dwt(np.ones(8), fp, 2)
    with pytest.raises(ValueError):
        samra.idwt(samra.DwtPyramid(p.approx, p.details[:1], 2, fp))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2**31))
def test_pr_property(A, B, p, q, seed):
    m = ParameterMatrix(A, B, -1 / B, 0.0, p, q)
    # Haar low-pass in the chirped basis: c_mod = (1, 1)/sqrt(2)
    c = S * np.conj(samra.chirp_taps([0, 1], m))
    d, _, kd0 = samra.wavelet_filter(c, m)
    fp = samra.make_filter_pair(c, d, m, 0, kd0)
    x = np.random.default_rng(seed).standard_normal(64) + 0j
    assert np.max(np.abs(samra.idwt(samra.dwt(x, fp, 3)) - x)) < 1e-12


# -- density -----------------------------------------------------------------------------


def test_density_ratios_increase_to_one(matrix):
    f = SampledSignal.from_function(lambda t: np.exp(-t**2), -8.0, 2.0**-12, 2**16)
    r = samra.density_diagnostic(samra.haar_scaling(), matrix, f, 8)
    assert np.all(np.diff(r) >= -1e-10)
    assert r[-1] > 0.999


def test_density_of_scaling_function_is_one():
    f = SampledSignal.from_function(
        lambda t: samra.scaling_system_values(samra.haar_scaling(), AFFINE, 3, 2, t), -2.0, 2.0**-10, 4096
    )
    r = samra.density_diagnostic(samra.haar_scaling(), AFFINE, f, 6, j_min=3)
    np.testing.assert_allclose(r, 1.0, atol=1e-12)


def test_density_rejects_coarse_grid():
    f = SampledSignal.from_function(lambda t: np.exp(-t**2), -8.0, 1 / 128, 2048)
    with pytest.raises(ValueError, match="too coarse"):
        samra.density_diagnostic(samra.haar_scaling(), AFFINE, f, 8)
