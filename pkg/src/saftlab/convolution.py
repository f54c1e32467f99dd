"""Special affine convolution and its SAFT-domain factorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .exceptions import DegenerateBError, GridMismatchError
from .params import ParameterMatrix
from .saft import kernel_prefactor, relative_rms, saft_forward
from .signals import SampledSignal, warn_if_truncated


@dataclass(frozen=True)
class ConvolutionResult:
    signal: SampledSignal
    matrix: ParameterMatrix


@dataclass(frozen=True)
class Residual:
    value: float
    kind: str = "relative"
    detail: dict | None = None

    def __float__(self):
        return float(self.value)


def convolution_prefactor(m: ParameterMatrix) -> complex:
    """``(2 pi i B)^(-1/2) exp(i D p^2 / 2B)``."""
    return kernel_prefactor(m.B) * np.exp(0.5j * m.D * m.p**2 / m.B)


def _lag_offset(f: SampledSignal, g: SampledSignal) -> int:
    if not np.isclose(f.dt, g.dt, rtol=1e-12, atol=0):
        raise GridMismatchError(f"f and g must share dt (got {f.dt} and {g.dt})")
    off = g.t0 / f.dt
    j = int(round(off))
    if abs(off - j) > 1e-9:
        raise GridMismatchError("g.t0 must be an integer multiple of dt so lags land on samples")
    return j


def _validate(m):
    m.require_valid(allow_b_zero=True)
    if m.B == 0:
        raise DegenerateBError("special affine convolution needs B != 0")


def affine_convolve(
    f: SampledSignal, g: SampledSignal, m: ParameterMatrix, method="direct", chunk=512, check=True
) -> ConvolutionResult:
    """Special affine convolution sampled on the grid of ``f``.

    ``h(t) = pref * integral f(tau) g(t - tau) exp{-i A tau (t - tau) / B} dtau``
    with ``pref = (2 pi i B)^(-1/2) exp(i D p^2 / 2B)``. This chirp sign is the
    one under which the SAFT of ``h`` factorizes as in
    :func:`convolution_theorem_check`.

    Parameters
    ----------
    method : {"direct", "fft"}
        ``"direct"`` is the O(N^2) reference quadrature. ``"fft"`` rewrites
        the chirp as ``exp(-iAt^2/2B) exp(iA tau^2/2B) exp(iA(t-tau)^2/2B)``
        and runs one ordinary linear convolution.
    check : bool
        Warn when the output is not contained in the window.
    """
    _validate(m)
    off = _lag_offset(f, g)
    A, B = m.A, m.B
    dt = f.dt
    pref = convolution_prefactor(m)
    tf = f.t
    if method == "direct":
        n_idx = np.arange(f.n)
        out = np.empty(f.n, complex)
        for r0 in range(0, f.n, chunk):
            rows = n_idx[r0 : r0 + chunk]
            j = rows[:, None] - n_idx[None, :] - off
            valid = (j >= 0) & (j < g.n)
            gv = np.where(valid, g.samples[np.clip(j, 0, g.n - 1)], 0.0)
            tau = tf[None, :]
            lag = tf[rows][:, None] - tau
            mat = gv * np.exp(-1j * A * tau * lag / B)
            out[r0 : r0 + chunk] = mat @ f.samples
        out *= pref * dt
    elif method == "fft":
        fc = f.samples * np.exp(0.5j * A * tf**2 / B)
        tg = g.t
        gc = g.samples * np.exp(0.5j * A * tg**2 / B)
        full = fftconvolve(fc, gc)
        # full[k] sits at time f.t0 + g.t0 + k*dt; keep f's grid
        k = np.arange(f.n) - off
        valid = (k >= 0) & (k < full.size)
        conv = np.where(valid, full[np.clip(k, 0, full.size - 1)], 0.0)
        out = pref * dt * np.exp(-0.5j * A * tf**2 / B) * conv
    else:
        raise ValueError(f"unknown method {method!r}")
    if check:
        warn_if_truncated(out, "convolution output")
    return ConvolutionResult(SampledSignal(f.t0, f.dt, out), m)


def theorem_rhs(Sf, Sg, m: ParameterMatrix):
    """``exp{ i/(2B)(2w(Dp - Bq) - D w^2) } S_f(w) S_g(w)`` on the shared grid."""
    A, B, C, D, p, q = m.as_tuple()
    w = Sf.omega
    return np.exp(0.5j * (2 * w * (D * p - B * q) - D * w**2) / B) * Sf.samples * Sg.samples


def convolution_theorem_check(f: SampledSignal, g: SampledSignal, m: ParameterMatrix, method="direct"):
    """Relative RMS between ``S_M[f *_M g]`` and the product form.

    ``g`` must have the same length and step as ``f`` so both spectra share
    one frequency grid. When both sides vanish the residual is absolute.
    """
    _validate(m)
    if f.n != g.n:
        raise GridMismatchError("f and g need the same number of samples for a shared omega grid")
    h = affine_convolve(f, g, m, method=method).signal
    Sh = saft_forward(h, m, check=False)
    rhs = theorem_rhs(saft_forward(f, m, check=False), saft_forward(g, m, check=False), m)
    lhs = Sh.samples
    if np.linalg.norm(rhs) == 0:
        return Residual(float(np.linalg.norm(lhs) * np.sqrt(Sh.domega)), "absolute")
    return Residual(relative_rms(lhs, rhs), "relative")

