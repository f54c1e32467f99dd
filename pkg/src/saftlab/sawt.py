"""Continuous special affine wavelet transform.

Daughter wavelets are

    psi_{b,a}(t) = (2 pi i a B)^(-1/2) psi((t - b)/a) exp{ -i/(2B) (A t^2 + D p^2 - A (b/a)^2) }

and the transform is ``W(b, a) = <f, psi_{b,a}>``. The mother wavelet may be a
:class:`~saftlab.signals.SampledSignal` (evaluated off-grid by band-limited
interpolation) or any callable of ``t``; callables with a ``fourier`` method
get an analytic spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import czt

from .convolution import Residual, affine_convolve
from .exceptions import AdmissibilityError, DegenerateBError
from .params import ParameterMatrix
from .saft import kernel_prefactor, output_chirp, saft_forward
from .signals import SampledSignal, evaluate, require_same_grid
from ._parallel import parallel_map


class Morlet:
    """Morlet mother wavelet ``exp(i gamma t - t^2/2)``.

    Its ordinary Fourier transform is ``sqrt(2 pi) exp(-(xi - gamma)^2 / 2)``;
    the mean ``sqrt(2 pi) exp(-gamma^2/2)`` is tiny but not zero, so it is
    only near-admissible.
    """

    def __init__(self, gamma: float = 5.0):
        self.gamma = float(gamma)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * self.gamma * t - 0.5 * t**2)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.sqrt(2 * np.pi) * np.exp(-0.5 * (xi - self.gamma) ** 2)

    def __repr__(self):
        return f"Morlet(gamma={self.gamma:g})"


class GaussianWavelet:
    """``exp(-t^2/2)``: not admissible, kept as a diagnostic counterexample."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * t**2) + 0j

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.sqrt(2 * np.pi) * np.exp(-0.5 * xi**2) + 0j


def _mother_fourier(psi, xi):
    """Ordinary Fourier transform of the mother wavelet at ``xi``."""
    xi = np.asarray(xi, dtype=float)
    if hasattr(psi, "fourier"):
        return np.asarray(psi.fourier(xi), dtype=complex)
    if isinstance(psi, SampledSignal):
        return _sampled_fourier(psi, xi)
    raise TypeError("mother wavelet needs a fourier() method or must be a SampledSignal")


def _sampled_fourier(psi: SampledSignal, xi):
    """``dt sum psi_n exp(-i xi t_n)``, zeroed outside the Nyquist band."""
    xi = np.asarray(xi, dtype=float)
    flat = xi.ravel()
    out = np.zeros(flat.size, complex)
    inband = np.abs(flat) <= np.pi / psi.dt
    if flat.size > 1 and np.allclose(np.diff(flat), flat[1] - flat[0], rtol=1e-9, atol=1e-14):
        # uniform xi: one chirp z-transform
        # scipy evaluates sum x[n] z_k^-n at z_k = a0 * w^-k
        w = np.exp(-1j * (flat[1] - flat[0]) * psi.dt)
        a0 = np.exp(1j * flat[0] * psi.dt)
        vals = czt(psi.samples, m=flat.size, w=w, a=a0)
        vals = psi.dt * vals * np.exp(-1j * flat * psi.t0)
    else:
        vals = psi.dt * (np.exp(-1j * np.outer(flat, psi.t)) @ psi.samples)
    out[inband] = vals[inband]
    return out.reshape(xi.shape)


def _validate(m: ParameterMatrix):
    m.require_valid(allow_b_zero=True)
    if m.B == 0:
        raise DegenerateBError("the wavelet transform needs B != 0")


def _scale_check(a):
    a = np.asarray(a, dtype=float)
    if np.any(~(a > 0)):
        raise ValueError("scales must be positive")
    return a


def daughter_prefactor(b, a, m: ParameterMatrix):
    """``(2 pi i a B)^(-1/2) exp{ -i/(2B)(D p^2 - A b^2/a^2) }``."""
    return kernel_prefactor(a * m.B) * np.exp(-0.5j * (m.D * m.p**2 - m.A * (b / a) ** 2) / m.B)


def daughter_values(psi, b, a, m: ParameterMatrix, t):
    """Evaluate ``psi_{b,a}`` at times ``t`` (``b`` may be an array broadcast against ``t``)."""
    t = np.asarray(t, dtype=float)
    b = np.asarray(b, dtype=float)
    x = (t - b) / a
    return daughter_prefactor(b, a, m) * evaluate(psi, x) * np.exp(-0.5j * m.A * t**2 / m.B)


@dataclass(frozen=True)
class DaughterWavelet:
    b: float
    a: float
    matrix: ParameterMatrix
    signal: SampledSignal


def daughter(psi, b: float, a: float, m: ParameterMatrix, grid: SampledSignal | None = None):
    """Sample the daughter wavelet ``psi_{b,a}`` on a time grid.

    Parameters
    ----------
    psi : SampledSignal or callable
        Mother wavelet.
    grid : SampledSignal, optional
        Any signal whose grid is used. Defaults to the grid of ``psi`` (which
        must then be a SampledSignal).
    """
    _validate(m)
    if not a > 0:
        raise ValueError(f"scale a must be positive, got {a}")
    ref = grid if grid is not None else psi
    if not isinstance(ref, SampledSignal):
        raise ValueError("pass grid= when the mother wavelet is analytic")
    vals = daughter_values(psi, b, a, m, ref.t)
    return DaughterWavelet(float(b), float(a), m, SampledSignal(ref.t0, ref.dt, vals))


@dataclass(frozen=True)
class ScalogramMap:
    b_grid: np.ndarray
    a_grid: np.ndarray
    coefficients: np.ndarray
    matrix: ParameterMatrix

    def __post_init__(self):
        b = np.asarray(self.b_grid, dtype=float)
        a = np.asarray(self.a_grid, dtype=float)
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (b.size, a.size):
            raise ValueError(f"coefficients shape {c.shape} does not match grids ({b.size}, {a.size})")
        if a.size > 1 and np.any(np.diff(a) <= 0):
            raise ValueError("a_grid must be strictly increasing")
        object.__setattr__(self, "b_grid", b)
        object.__setattr__(self, "a_grid", a)
        object.__setattr__(self, "coefficients", c)

    @property
    def abs(self):
        return np.abs(self.coefficients)


def _grids(b_grid, a_grid):
    b = np.atleast_1d(np.asarray(b_grid, dtype=float))
    a = _scale_check(np.atleast_1d(np.asarray(a_grid, dtype=float)))
    if b.size == 0 or a.size == 0:
        raise ValueError("b_grid and a_grid must be non-empty")
    if a.size > 1 and np.any(np.diff(a) <= 0):
        raise ValueError("a_grid must be strictly increasing")
    return b, a


def sawt_forward(f: SampledSignal, psi, b_grid, a_grid, m: ParameterMatrix, method="direct", n_jobs=None):
    """Wavelet coefficients ``W(b, a) = dt * sum_n f(t_n) conj(psi_{b,a}(t_n))``.

    Parameters
    ----------
    method : {"direct", "convolution"}
        ``"direct"`` evaluates the inner products. ``"convolution"`` runs the
        special affine convolution of ``f`` with the reflected, conjugated,
        dilated wavelet and reads it at ``t = b`` (``b`` must lie on the grid
        of ``f``).
    n_jobs : int, optional
        Worker threads over scales; defaults to ``SAFTLAB_THREADS``.
    """
    _validate(m)
    b, a = _grids(b_grid, a_grid)
    t = f.t

    if method == "direct":
        def column(aj):
            rows = daughter_values(psi, b[:, None], aj, m, t[None, :])
            return f.dt * (np.conj(rows) @ f.samples)
    elif method == "convolution":
        idx = np.rint((b - f.t0) / f.dt).astype(int)
        if np.any(np.abs(f.t0 + idx * f.dt - b) > 1e-9 * f.dt) or idx.min() < 0 or idx.max() >= f.n:
            raise ValueError("convolution path needs every b on the signal grid")
        # g_a must be sampled at lags on the same grid; centre it on t = 0
        lag0 = -(f.n // 2) * f.dt

        def column(aj):
            g = convolution_filter(psi, aj, m, lag0, f.dt, f.n)
            h = affine_convolve(f, g, m, method="fft", check=False).signal.samples[idx]
            return convolution_phase(b, aj, m) * h
    else:
        raise ValueError(f"unknown method {method!r}")

    cols = parallel_map(column, a, n_jobs)
    return ScalogramMap(b, a, np.column_stack(cols), m)


def convolution_filter(psi, a, m: ParameterMatrix, t0, dt, n) -> SampledSignal:
    """``g_a(t) = a^(-1/2) conj(psi(-t/a)) exp(-i A t^2 / 2B)`` sampled on a lag grid."""
    t = t0 + dt * np.arange(n)
    vals = np.conj(evaluate(psi, -t / a)) * np.exp(-0.5j * m.A * t**2 / m.B) / np.sqrt(a)
    return SampledSignal(t0, dt, vals)


def convolution_phase(b, a, m: ParameterMatrix):
    """Factor turning ``(f *_M g_a)(b)`` into ``W(b, a)``.

    Equals ``i sign(B) exp{ i (A/2B)(1 - 1/a^2) b^2 }``; the ``i sign(B)``
    comes from ``sqrt(iB) / conj(sqrt(iB))`` on the principal branch.
    """
    b = np.asarray(b, dtype=float)
    kappa = 1j * np.sign(m.B)
    return kappa * np.exp(0.5j * m.A / m.B * (1 - 1 / a**2) * b**2)


def sawt_spectral(f: SampledSignal, psi, b_grid, a_grid, m: ParameterMatrix, n_jobs=None):
    """Wavelet coefficients computed through the SAFT domain.

    Uses ``W(b, a) = integral S_f(w) conj(S_M[psi_{b,a}](w)) dw`` with

        S_M[psi_{b,a}](w) = K0 E(w) sqrt(a) (2 pi i B)^(-1/2)
                            exp{-i/(2B)(D p^2 - A b^2/a^2)} exp(-i nu b) Psi(a nu),

    ``nu = (w - p)/B``, ``K0 E(w)`` the SAFT output chirp and ``Psi`` the
    ordinary Fourier transform of the mother wavelet.
    """
    _validate(m)
    b, a = _grids(b_grid, a_grid)
    S = saft_forward(f, m, check=False)
    omega = S.omega
    nu = S.nu
    base = S.samples * np.conj(kernel_prefactor(m.B) * output_chirp(m, omega)) * S.domega
    phase = np.exp(1j * np.outer(b, nu))

    def column(aj):
        psi_hat = _mother_fourier(psi, aj * nu)
        integral = phase @ (base * np.conj(psi_hat))
        pref = np.sqrt(aj) * kernel_prefactor(m.B) * np.exp(
            -0.5j * (m.D * m.p**2 - m.A * b**2 / aj**2) / m.B
        )
        return np.conj(pref) * integral

    cols = parallel_map(column, a, n_jobs)
    return ScalogramMap(b, a, np.column_stack(cols), m)


def gaussian_morlet_closed_form(alpha, beta, gamma, b, a, m: ParameterMatrix):
    """Closed form of the transform of ``exp(-(alpha t + beta t^2))`` with a Morlet wavelet.

    ``W = conj((2 pi i a B)^(-1/2)) sqrt(pi/P) exp(Q^2/(4P) + c0)`` where

        P  = beta + 1/(2a^2) - iA/(2B)
        Q  = -alpha - i gamma/a + b/a^2
        c0 = i gamma b/a - b^2/(2a^2) + i/(2B)(D p^2 - A b^2/a^2)

    Requires ``Re P > 0``.
    """
    _validate(m)
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    A, B, D, p = m.A, m.B, m.D, m.p
    P = beta + 0.5 / a**2 - 0.5j * A / B
    Q = -alpha - 1j * gamma / a + b / a**2
    c0 = 1j * gamma * b / a - 0.5 * b**2 / a**2 + 0.5j * (D * p**2 - A * b**2 / a**2) / B
    return np.conj(kernel_prefactor(a * B)) * np.sqrt(np.pi / P) * np.exp(Q**2 / (4 * P) + c0)


# -- admissibility -----------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityResult:
    c_psi: float
    omega_probes: np.ndarray
    per_probe: np.ndarray
    a_min: float
    a_max: float
    spread: float = 0.0
    divergent: bool = False
    low_decade_fraction: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def require_admissible(self):
        if self.divergent:
            raise AdmissibilityError(
                "admissibility integral keeps growing toward small scales "
                f"(lowest-decade share {np.max(self.low_decade_fraction):.3g})"
            )
        if not self.c_psi > 0:
            raise AdmissibilityError("admissibility constant is zero")
        return self


def default_probes(m: ParameterMatrix, n=8):
    """Probe frequencies ``p + B*nu`` with reduced frequencies log-spaced on [1, 10]."""
    return m.p + m.B * np.logspace(0.0, 1.0, n)


def _as_sampled(psi, grid=None):
    if isinstance(psi, SampledSignal):
        return psi
    if grid is None:
        grid = SampledSignal(-32.0, 1 / 64, np.zeros(4096))
    return SampledSignal(grid.t0, grid.dt, evaluate(psi, grid.t))


def admissibility(
    psi,
    m: ParameterMatrix,
    a_min=1e-3,
    a_max=1e3,
    n_a=256,
    omega_probes=None,
    grid=None,
    divergence_tol=1e-2,
):
    """Scale integral ``C(w) = integral |S_M[chi_a](a w)|^2 / a da`` at probe frequencies.

    ``chi_a(z) = exp{ i/(2B)(2 z p (a - 1) - A z^2) } conj(psi(-z))``. For each
    scale the inner SAFT is a Riemann sum over the samples of ``psi`` (analytic
    wavelets are sampled on ``grid``), band-limited to the sampling Nyquist
    band. Quadrature in ``a`` is the trapezoid rule in ``log a``.

    The divergence flag is raised when the lowest decade of scales carries more
    than ``divergence_tol`` of the integral at any probe.
    """
    _validate(m)
    if not (a_min > 0 and a_max > a_min):
        raise ValueError("need 0 < a_min < a_max")
    if n_a < 16:
        raise ValueError("n_a must be at least 16")
    probes = default_probes(m) if omega_probes is None else np.atleast_1d(np.asarray(omega_probes, float))
    s = _as_sampled(psi, grid)
    A, B, p = m.A, m.B, m.p
    a = np.geomspace(a_min, a_max, n_a)
    la = np.log(a)
    z = -s.t  # chi_a is evaluated on the reflected grid z = -t
    conj_psi = np.conj(s.samples)
    nyq = np.pi / s.dt
    per_probe = np.empty(probes.size)
    low_frac = np.empty(probes.size)
    for i, w in enumerate(probes):
        Om = a * w
        chi = np.exp(0.5j * (2 * np.outer(a - 1, z) * p - A * z[None, :] ** 2) / B) * conj_psi[None, :]
        # SAFT of chi_a at a*w: chirp-FFT-chirp form evaluated pointwise
        inner = np.exp(0.5j * (A * z[None, :] ** 2 + 2 * z[None, :] * (p - Om[:, None])) / B)
        vals = s.dt * np.sum(chi * inner, axis=1)
        vals *= kernel_prefactor(B) * output_chirp(m, Om)
        vals[np.abs(a * (w - p) / B) > nyq] = 0.0
        integrand = np.abs(vals) ** 2  # da/a = d(log a)
        total = trapezoid(integrand, la)
        per_probe[i] = total
        cut = a <= 10 * a_min
        low = trapezoid(integrand[cut], la[cut]) if cut.sum() > 1 else 0.0
        low_frac[i] = low / total if total > 0 else 0.0
    c_psi = float(np.mean(per_probe))
    spread = float((per_probe.max() - per_probe.min()) / c_psi) if c_psi > 0 else 0.0
    return AdmissibilityResult(
        c_psi, probes, per_probe, float(a_min), float(a_max), spread,
        bool(np.any(low_frac > divergence_tol)), low_frac,
    )


def morlet_admissibility_exact(gamma, m: ParameterMatrix):
    """``(1/(2 pi |B|)) * 2 pi * integral_0^inf exp(-(xi - gamma)^2)/xi dxi`` by quadrature."""
    from scipy.integrate import quad

    val, _ = quad(lambda x: np.exp(-((x - gamma) ** 2)) / x, 0, np.inf, limit=400)
    return val / abs(m.B)


# -- Moyal, inversion, kernel ----------------------------------------------------------


def measure_weights(b_grid, a_grid):
    """Trapezoid weights for ``db da / a^2`` on a (b, log a) grid."""
    b = np.asarray(b_grid, float)
    a = np.asarray(a_grid, float)
    wb = _trap_weights(b)
    wa = _trap_weights(np.log(a)) / a
    return np.outer(wb, wa)


def _trap_weights(x):
    x = np.asarray(x, float)
    if x.size == 1:
        return np.ones(1)
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def moyal_check(f, g, psi, m, b_grid, a_grid, adm: AdmissibilityResult, n_jobs=None):
    """Relative deviation of the discretized Moyal identity.

    Compares ``sum w W_f conj(W_g)`` (weights from :func:`measure_weights`) with
    ``C_psi <f, g>``. When the right-hand side is negligible the absolute
    deviation scaled by ``||f|| ||g||`` is returned instead.
    """
    require_same_grid(f, g)
    Wf = sawt_forward(f, psi, b_grid, a_grid, m, n_jobs=n_jobs).coefficients
    Wg = sawt_forward(g, psi, b_grid, a_grid, m, n_jobs=n_jobs).coefficients
    w = measure_weights(b_grid, a_grid)
    lhs = complex(np.sum(w * Wf * np.conj(Wg)))
    rhs = adm.c_psi * f.inner(g)
    scale = f.norm() * g.norm()
    if scale == 0:
        return Residual(abs(lhs), "absolute", {"lhs": lhs, "rhs": rhs})
    if abs(rhs) <= 1e-8 * adm.c_psi * scale:
        return Residual(abs(lhs - rhs) / scale, "absolute", {"lhs": lhs, "rhs": rhs})
    return Residual(abs(lhs - rhs) / abs(rhs), "relative", {"lhs": lhs, "rhs": rhs})


def sawt_inverse(W: ScalogramMap, psi, adm: AdmissibilityResult, grid: SampledSignal, n_jobs=None):
    """Reconstruct ``f = (1/C_psi) sum w(b,a) W(b,a) psi_{b,a}`` on ``grid``."""
    if not adm.c_psi > 0:
        raise AdmissibilityError("cannot invert with C_psi = 0")
    m = W.matrix
    _validate(m)
    w = measure_weights(W.b_grid, W.a_grid)
    t = grid.t
    b = W.b_grid

    def column(j):
        aj = W.a_grid[j]
        coef = w[:, j] * W.coefficients[:, j]
        if not np.any(coef):
            return np.zeros(t.size, complex)
        rows = daughter_values(psi, b[:, None], aj, m, t[None, :])
        return coef @ rows

    parts = parallel_map(column, range(W.a_grid.size), n_jobs)
    return SampledSignal(grid.t0, grid.dt, np.sum(parts, axis=0) / adm.c_psi)


def reproducing_kernel(b, a, b2, a2, psi, m: ParameterMatrix, grid: SampledSignal):
    """``<psi_{b,a}, psi_{b2,a2}>`` by quadrature on ``grid``."""
    d1 = daughter(psi, b, a, m, grid).signal
    d2 = daughter(psi, b2, a2, m, grid).signal
    return d1.inner(d2)


def reproducing_check(W: ScalogramMap, psi, adm, grid, probes):
    """Reproduce ``W`` at probe cells from the kernel integral.

    Returns the worst relative deviation over ``probes`` (list of (i, j) cell
    indices) between ``W`` and ``(1/C) sum w W K``.
    """
    m = W.matrix
    w = measure_weights(W.b_grid, W.a_grid)
    t = grid.t
    worst = 0.0
    for i, j in probes:
        target = daughter_values(psi, W.b_grid[i], W.a_grid[j], m, t)
        acc = 0.0 + 0j
        for jj, aj in enumerate(W.a_grid):
            rows = daughter_values(psi, W.b_grid[:, None], aj, m, t[None, :])
            kern = grid.dt * (rows @ np.conj(target))
            acc += np.sum(w[:, jj] * W.coefficients[:, jj] * kern)
        approx = acc / adm.c_psi
        ref = W.coefficients[i, j]
        worst = max(worst, abs(approx - ref) / abs(ref))
    return worst


# -- window metrics ---------------------------------------------------------------------


@dataclass(frozen=True)
class WindowSpec:
    center_time: float
    radius_time: float
    center_freq: float
    radius_freq: float
    q_factor: float


def window_metrics(psi, b, a, m: ParameterMatrix, grid: SampledSignal):
    """Time and frequency windows of ``psi_{b,a}``.

    Time centre and radius are the mean and standard deviation of
    ``|psi_{b,a}(t)|^2``. The frequency window is measured in the reduced
    frequency ``nu = (w - p)/B`` of ``|S_M[psi_{b,a}]|^2``, which is where the
    transform localizes; the centre scales as ``1/a`` and ``q_factor`` is the
    ratio of radius to centre.
    """
    d = daughter(psi, b, a, m, grid).signal
    wt = np.abs(d.samples) ** 2
    if not wt.sum() > 0:
        raise ValueError("zero-energy wavelet has no window")
    t = d.t
    ct = float(np.sum(t * wt) / wt.sum())
    rt = float(np.sqrt(np.sum((t - ct) ** 2 * wt) / wt.sum()))
    S = saft_forward(d, m, check=False)
    ws = np.abs(S.samples) ** 2
    nu = S.nu
    cf = float(np.sum(nu * ws) / ws.sum())
    rf = float(np.sqrt(np.sum((nu - cf) ** 2 * ws) / ws.sum()))
    return WindowSpec(ct, rt, cf, rf, rf / cf)


# -- covariance identities ----------------------------------------------------------------


def covariance_checks(f: SampledSignal, psi, m: ParameterMatrix, k: float, mu: float, b_grid, a_grid):
    """Numerical check of the translation and scaling covariance of the transform.

    Translation::

        W[f(. - k)](b, a) = exp{-i (A/2B)(2bk/a^2 - (1 + 1/a^2) k^2)} W[exp(i(A/B) k t) f](b - k, a)

    Scaling::

        W[f(mu .)](b, a) = mu^(-1/2) W[exp{-i (A/2B)(1 - 1/mu^2) t^2} f](mu b, mu a)

    Off-grid samples of ``f`` come from band-limited interpolation.
    Returns a dict of max relative deviations.
    """
    _validate(m)
    if not mu > 0:
        raise ValueError("mu must be positive")
    b, a = _grids(b_grid, a_grid)
    A, B = m.A, m.B
    t = f.t
    bb, aa = np.meshgrid(b, a, indexing="ij")

    shifted = f.with_samples(f(t - k))
    lhs_t = sawt_forward(shifted, psi, b, a, m).coefficients
    mod = f.with_samples(np.exp(1j * A / B * k * t) * f.samples)
    rhs_t = sawt_forward(mod, psi, b - k, a, m).coefficients
    rhs_t = rhs_t * np.exp(-0.5j * A / B * (2 * bb * k / aa**2 - (1 + 1 / aa**2) * k**2))

    scaled = f.with_samples(f(mu * t))
    lhs_s = sawt_forward(scaled, psi, b, a, m).coefficients
    chirped = f.with_samples(np.exp(-0.5j * A / B * (1 - 1 / mu**2) * t**2) * f.samples)
    rhs_s = sawt_forward(chirped, psi, mu * b, mu * a, m).coefficients / np.sqrt(mu)

    def dev(x, y):
        den = np.max(np.abs(x))
        return float(np.max(np.abs(x - y)) / den) if den > 0 else float(np.max(np.abs(y)))

    return {"translation": dev(lhs_t, rhs_t), "scaling": dev(lhs_s, rhs_s)}
