import warnings

import numpy as np
import pytest

from saftlab import params, signals
from saftlab.exceptions import GridMismatchError, TruncationWarning
from saftlab.signals import SampledSignal, SignalFormatError


def test_sampled_signal_is_read_only():
    s = SampledSignal(0.0, 0.1, np.arange(4.0))
    with pytest.raises(ValueError):
        s.samples[0] = 1.0
    assert s.samples.dtype == complex
    assert s.n == 4 and s.t_end == pytest.approx(0.3)


@pytest.mark.parametrize("dt", [0.0, -1.0])
def test_bad_step(dt):
    with pytest.raises(ValueError):
        SampledSignal(0.0, dt, np.ones(4))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        SampledSignal(0.0, 1.0, [1.0, np.nan])


def test_inner_requires_same_grid():
    a = SampledSignal(0.0, 0.1, np.ones(8))
    b = SampledSignal(0.05, 0.1, np.ones(8))
    with pytest.raises(GridMismatchError):
        a.inner(b)


def test_inner_and_energy():
    s = SampledSignal(0.0, 0.5, [1.0, 1j, 2.0])
    assert s.energy() == pytest.approx(0.5 * 6)
    assert s.inner(s) == pytest.approx(s.energy())


def test_gaussian_peak_at_vertex():
    g = signals.gaussian(1, 1, -8, 8, 2048)
    assert g.t[np.argmax(np.abs(g.samples))] == pytest.approx(-0.5, abs=g.dt)


def test_impulse_value():
    s = signals.impulse(0.0, -8, 8, 2048)
    nz = np.flatnonzero(s.samples)
    assert nz.size == 1
    assert s.samples[nz[0]] == pytest.approx(1 / s.dt)
    assert s.dt * s.samples.sum() == pytest.approx(1.0)


def test_noise_deterministic():
    a = signals.noise(42)
    b = signals.noise(42)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, signals.noise(43).samples)


def test_random_bandlimited_contained(rng):
    s = signals.random_bandlimited(rng)
    assert signals.is_contained(s.samples)
    spec = np.abs(np.fft.fft(s.samples))
    nu = np.abs(2 * np.pi * np.fft.fftfreq(s.n, s.dt))
    assert spec[nu > 0.5 * np.pi / s.dt].max() < 1e-8 * spec.max()


def test_truncation_warning():
    s = np.ones(16)
    with pytest.warns(TruncationWarning):
        assert not signals.warn_if_truncated(s)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert signals.warn_if_truncated(signals.gaussian(0, 1).samples)


def test_bandlimited_interp_exact_on_grid():
    g = signals.gaussian(0, 0.5, -16, 16, 1024)
    np.testing.assert_allclose(g(g.t[100:110]), g.samples[100:110], atol=1e-12)


def test_bandlimited_interp_off_grid():
    g = signals.gaussian(0.3, 0.5, -16, 16, 1024)
    x = np.linspace(-3, 3, 41) + 0.37 * g.dt
    ref = np.exp(-(0.3 * x + 0.5 * x**2))
    np.testing.assert_allclose(g(x), ref, atol=5e-7)


def test_csv_roundtrip(tmp_path):
    s = signals.chirp()
    path = tmp_path / "s.csv"
    signals.write_signal(path, s)
    r = signals.read_signal(path)
    assert r.t0 == pytest.approx(s.t0) and r.dt == pytest.approx(s.dt)
    np.testing.assert_array_equal(r.samples, s.samples)


def test_binary_roundtrip(tmp_path):
    s = signals.noise(3, n=64)
    path = tmp_path / "s.bin"
    signals.write_signal(path, s)
    r = signals.read_signal(path)
    np.testing.assert_array_equal(r.samples, s.samples)


def test_spectrum_roundtrip(tmp_path):
    from saftlab.saft import saft_forward

    m = params.ParameterMatrix(2, 1, 1, 1, 1, 1)
    s = signals.gaussian(0, 1, -8, 8, 256)
    F = saft_forward(s, m)
    path = tmp_path / "F.csv"
    signals.write_spectrum(path, F)
    R = signals.read_spectrum(path, m, t0=s.t0)
    assert R.dt == pytest.approx(s.dt)
    np.testing.assert_array_equal(R.samples, F.samples)


@pytest.mark.parametrize("text, line", [
    ("x,re,im\n0,1,0\n1,1,0\n", 1),
    ("t,re,im\n0,1,0\n1,1\n", 3),
    ("t,re,im\n0,1,0\n1,abc,0\n", 3),
    ("t,re,im\n0,1,0\n1,1,0\n2,1,0\n4,1,0\n5,1,0\n", 5),
])
def test_malformed_files_report_line(tmp_path, text, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(SignalFormatError, match=f"line {line}"):
        signals.read_signal(path)


def test_time_grid_excludes_endpoint():
    t0, dt = signals.time_grid(-8, 8, 2048)
    assert t0 == -8 and dt == pytest.approx(16 / 2048)
    with pytest.raises(ValueError):
        signals.time_grid(1, 0, 10)
