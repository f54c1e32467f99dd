"""Discrete special affine Fourier transform.

The kernel is

    K_M(t, w) = (2*pi*i*B)^(-1/2) exp{ i/(2B) (A t^2 + 2t(p - w) - 2w(Dp - Bq) + D(w^2 + p^2)) }

and on the grid ``w = p + B*nu`` (``nu`` the FFT angular-frequency grid) the
transform factors into chirp, FFT, chirp.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DegenerateBError, GridMismatchError
from .params import ParameterMatrix, inverse
from .signals import SampledSignal, SpectrumSignal, warn_if_truncated


def kernel_prefactor(B: float) -> complex:
    """``1/sqrt(2*pi*i*B)`` on the principal branch."""
    return 1.0 / np.sqrt(2j * np.pi * B + 0j)


def kernel(m: ParameterMatrix, t, omega):
    """Pointwise SAFT kernel ``K_M(t, omega)`` (broadcasts)."""
    A, B, C, D, p, q = m.as_tuple()
    t = np.asarray(t, dtype=float)
    omega = np.asarray(omega, dtype=float)
    phase = A * t**2 + 2 * t * (p - omega) - 2 * omega * (D * p - B * q) + D * (omega**2 + p**2)
    return kernel_prefactor(B) * np.exp(0.5j * phase / B)


def output_chirp(m: ParameterMatrix, omega):
    """``exp{ i/(2B) (D w^2 - 2w(Dp - Bq) + D p^2) }``, the post-FFT chirp."""
    A, B, C, D, p, q = m.as_tuple()
    omega = np.asarray(omega, dtype=float)
    return np.exp(0.5j * (D * omega**2 - 2 * omega * (D * p - B * q) + D * p**2) / B)


def inverse_phase(m: ParameterMatrix) -> complex:
    """Constant left over when the inverse kernel is applied literally.

    Applying ``K_{M^-1}`` to ``S_M f`` gives ``f`` times
    ``exp{-(i/2)(C D p^2 + A B q^2 - 2 A D p q)}``; this returns the reciprocal.
    """
    A, B, C, D, p, q = m.as_tuple()
    return np.exp(0.5j * (C * D * p**2 + A * B * q**2 - 2 * A * D * p * q))


def _require_integral(m: ParameterMatrix):
    m.require_valid(allow_b_zero=True)
    if m.B == 0:
        raise DegenerateBError("B = 0: use saft_chirp_branch instead of the integral transform")


def nu_grid(n: int, dt: float) -> np.ndarray:
    """Centred FFT angular frequencies, ascending, spanning [-pi/dt, pi/dt)."""
    return 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, dt))


def omega_grid(n: int, dt: float, m: ParameterMatrix):
    """Return ``(omega0, domega)`` of the library's SAFT-domain grid."""
    nu = nu_grid(n, dt)
    nu_edge = nu[0] if m.B > 0 else nu[-1]
    return m.p + m.B * nu_edge, abs(m.B) * 2 * np.pi / (n * dt)


def _kernel_sum(x, s0, ds, y0, dy, m: ParameterMatrix):
    """``Y_n = ds * sum_k x_k K_M(s0 + k ds, y0 + n dy)`` through one FFT.

    Requires ``ds * dy / B = 2*pi/N``; steps may be negative.
    """
    A, B, C, D, p, q = m.as_tuple()
    n = x.size
    k = np.arange(n)
    s = s0 + ds * k
    y = y0 + dy * k
    pre = x * np.exp(0.5j * (A * s**2 + 2 * s * p) / B) * np.exp(-1j * k * ds * y0 / B)
    core = np.fft.fft(pre)
    post = np.exp(-1j * (s0 * y0 + s0 * k * dy) / B)
    return ds * kernel_prefactor(B) * output_chirp(m, y) * post * core


def saft_forward(f: SampledSignal, m: ParameterMatrix, check=True) -> SpectrumSignal:
    """SAFT of a sampled signal.

    Parameters
    ----------
    f : SampledSignal
        Time-domain samples. Energy should be contained in the window.
    m : ParameterMatrix
        Valid matrix with ``B != 0``.
    check : bool
        Emit a :class:`TruncationWarning` when ``f`` is not contained.

    Returns
    -------
    SpectrumSignal
        Samples on ``omega_k = p + B*nu_k`` sorted by increasing ``omega``.
        The discrete transform is exactly unitary: ``energy`` is preserved.
    """
    _require_integral(m)
    if check:
        warn_if_truncated(f.samples, "input signal")
    n = f.n
    omega0, domega = omega_grid(n, f.dt, m)
    dy = m.B * 2 * np.pi / (n * f.dt)
    # walk the grid from the end that makes dy a valid signed step
    y_start = omega0 if dy > 0 else omega0 + (n - 1) * domega
    out = _kernel_sum(f.samples, f.t0, f.dt, y_start, dy, m)
    if dy < 0:
        out = out[::-1]
    return SpectrumSignal(m, omega0, domega, out, f.t0, f.dt)


def _check_grid(F: SpectrumSignal):
    m = F.matrix
    omega0, domega = omega_grid(F.n, F.dt, m)
    tol = 1e-9 * max(1.0, abs(omega0), domega * F.n)
    if abs(domega - F.domega) > 1e-9 * domega or abs(omega0 - F.omega0) > tol:
        raise GridMismatchError(
            f"spectrum grid (omega0={F.omega0}, domega={F.domega}) does not follow the "
            f"convention omega = p + B*nu for N={F.n}, dt={F.dt} "
            f"(expected omega0={omega0}, domega={domega})"
        )


def saft_inverse(F: SpectrumSignal) -> SampledSignal:
    """Invert :func:`saft_forward` using the inverse-matrix kernel.

    The kernel of ``inverse(M)`` is summed over the spectrum grid and lands on
    the time grid recorded in ``F``; a constant unimodular phase (see
    :func:`inverse_phase`) is restored so the roundtrip is the identity.
    """
    m = F.matrix
    _require_integral(m)
    _check_grid(F)
    mi = inverse(m)
    n = F.n
    dy = mi.B * 2 * np.pi / (n * F.domega)
    t_end = F.t0 + (n - 1) * F.dt
    y_start = F.t0 if dy > 0 else t_end
    out = _kernel_sum(F.samples, F.omega0, F.domega, y_start, dy, mi)
    if dy < 0:
        out = out[::-1]
    return SampledSignal(F.t0, F.dt, out * inverse_phase(m))


def saft_direct(f: SampledSignal, m: ParameterMatrix, omega, chunk=256) -> np.ndarray:
    """Brute-force Riemann sum ``dt * sum_n f(t_n) K_M(t_n, omega)``.

    O(N * len(omega)); used as an oracle for the fast path.
    """
    _require_integral(m)
    omega = np.asarray(omega, dtype=float)
    t = f.t
    out = np.empty(omega.size, complex)
    for i in range(0, omega.size, chunk):
        w = omega[i : i + chunk]
        out[i : i + chunk] = f.dt * (kernel(m, t[None, :], w[:, None]) @ f.samples)
    return out


def saft_chirp_branch(f: SampledSignal, m: ParameterMatrix) -> SampledSignal:
    """Degenerate ``B = 0`` case: chirp multiplication on a rescaled grid.

    Output sample ``n`` sits at ``omega_n = t_n / D + p`` and equals
    ``sqrt(D) exp{ (i/2)(C D (w - p)^2 + 2 w q) } f(D (w - p))``. The result is
    returned as a :class:`SampledSignal` whose time axis is the ``omega`` axis.
    """
    m.require_valid(allow_b_zero=True)
    A, B, C, D, p, q = m.as_tuple()
    if B != 0:
        raise ValueError("saft_chirp_branch needs B = 0")
    if not D > 0:
        raise DegenerateBError(f"chirp branch needs D > 0 for sqrt(D), got D = {D}")
    w0, dw = f.t0 / D + p, f.dt / D
    w = w0 + dw * np.arange(f.n)
    vals = np.sqrt(D) * np.exp(0.5j * (C * D * (w - p) ** 2 + 2 * w * q)) * f.samples
    return SampledSignal(w0, dw, vals)


def dt_saft(c, m: ParameterMatrix, omega, k0: int = 0):
    """Discrete-time SAFT of a finite sequence.

    ``C(w) = (2 pi i B)^(-1/2) sum_k c[k] exp{ i/(2B)(A k^2 + 2k(p - w) - 2w(Dp - Bq) + D w^2) }``
    with ``c[0]`` at index ``k0``. ``|C(w)|`` is ``2*pi*B`` periodic.
    """
    _require_integral(m)
    c = np.asarray(c, dtype=complex).ravel()
    if c.size == 0:
        raise ValueError("dt_saft needs a non-empty sequence")
    A, B, C, D, p, q = m.as_tuple()
    omega = np.asarray(omega, dtype=float)
    w = omega.reshape(-1, 1)
    k = (k0 + np.arange(c.size))[None, :]
    phase = A * k**2 + 2 * k * (p - w) - 2 * w * (D * p - B * q) + D * w**2
    out = kernel_prefactor(B) * (np.exp(0.5j * phase / B) @ c)
    return out.reshape(omega.shape) if omega.ndim else complex(out[0])


def parseval_residual(f: SampledSignal, F: SpectrumSignal) -> float:
    ef = f.energy()
    if ef == 0:
        return abs(F.energy())
    return abs(F.energy() - ef) / ef


def relative_rms(x, ref) -> float:
    x = np.asarray(x)
    ref = np.asarray(ref)
    den = np.linalg.norm(ref)
    num = np.linalg.norm(x - ref)
    return float(num / den) if den > 0 else float(num)
