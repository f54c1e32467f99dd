"""Chirp-modulated multiresolution analysis.

Scaling systems are ``phi_{j,k}(t) = 2^(j/2) phi(2^j t - k) exp{-i/(2B)(A t^2 + D p^2 - A k^2)}``.
Riesz sums use the ordinary Fourier transform of ``phi`` evaluated at the
reduced frequency ``(w - p)/B``; all chirp phases of the discrete algorithm
live in the modulated filters ``c_mod[k] = c[k] exp(i A k^2 / 2B)``.

Scaling functions are objects with ``__call__(t)``, ``fourier(xi)`` and a
``support`` tuple. :class:`StepFunction`, :class:`BSpline`, and
:class:`OrthonormalizedScaling` provide these analytically;
:class:`SampledScaling` wraps a :class:`~saftlab.signals.SampledSignal`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline as _SciBSpline

from .convolution import Residual
from .exceptions import (
    DegenerateBError,
    NotRefinableError,
    QMFError,
    SaftlabError,
    TailNotConvergedError,
)
from .params import ParameterMatrix
from .signals import SampledSignal, bandlimited_interp


class RieszBoundError(SaftlabError, ValueError):
    """Lower Riesz bound vanishes; the translates are not a Riesz basis."""


# -- scaling functions ---------------------------------------------------------------


class StepFunction:
    """Piecewise-constant ``sum_k values[k] chi_[start + k w, start + (k+1) w)``."""

    def __init__(self, values, width=1.0, start=0.0):
        self.values = np.asarray(values, dtype=complex).ravel()
        self.width = float(width)
        self.start = float(start)
        if self.values.size == 0 or not self.width > 0:
            raise ValueError("step function needs values and a positive width")

    @property
    def support(self):
        return (self.start, self.start + self.width * self.values.size)

    @property
    def breakpoints(self):
        return self.start + self.width * np.arange(self.values.size + 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        cell = np.floor((t - self.start) / self.width).astype(np.int64)
        inside = (cell >= 0) & (cell < self.values.size)
        return np.where(inside, self.values[np.clip(cell, 0, self.values.size - 1)], 0.0)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        centres = self.start + self.width * (np.arange(self.values.size) + 0.5)
        cell = self.width * np.sinc(xi * self.width / (2 * np.pi))
        return cell * (np.exp(-1j * np.multiply.outer(xi, centres)) @ self.values)

    def __repr__(self):
        return f"StepFunction({self.values.tolist()}, width={self.width:g}, start={self.start:g})"


def haar_scaling():
    """Indicator of ``[0, 1)``."""
    return StepFunction([1.0])


class BSpline:
    """Cardinal B-spline of the given order (degree ``order - 1``) on ``[0, order]``."""

    def __init__(self, order: int = 2):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = int(order)
        self._spl = _SciBSpline.basis_element(np.arange(order + 1), extrapolate=False)

    @property
    def support(self):
        return (0.0, float(self.order))

    @property
    def breakpoints(self):
        return np.arange(self.order + 1, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.nan_to_num(self._spl(t), nan=0.0)
        if self.order == 1:
            out = np.where((t >= 0) & (t < 1), 1.0, 0.0)
        return out + 0j

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return (np.exp(-0.5j * xi) * np.sinc(xi / (2 * np.pi))) ** self.order

    def __repr__(self):
        return f"BSpline(order={self.order})"


class OrthonormalizedScaling:
    """``sum_n e[n] phi(t - n)`` whose transform is ``E(xi) phi_hat(xi)``.

    ``E`` is the truncated Fourier series of ``G^(-1/2)`` with
    ``G(xi) = sum_k |phi_hat(xi + 2 pi k)|^2``.
    """

    def __init__(self, base, coeffs, n0: int):
        self.base = base
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.n0 = int(n0)

    @property
    def shifts(self):
        return self.n0 + np.arange(self.coeffs.size)

    @property
    def support(self):
        lo, hi = self.base.support
        return (lo + self.shifts[0], hi + self.shifts[-1])

    @property
    def breakpoints(self):
        bp = getattr(self.base, "breakpoints", None)
        if bp is None:
            return None
        return np.unique(np.concatenate([bp + n for n in self.shifts]))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, complex)
        lo, hi = self.base.support
        # only shifts n with t - n in [lo, hi) contribute
        top = np.floor(t - lo).astype(int)
        for j in range(int(np.ceil(hi - lo)) + 1):
            n = top - j
            idx = n - self.n0
            ok = (idx >= 0) & (idx < self.coeffs.size)
            if ok.any():
                out[ok] += self.coeffs[idx[ok]] * self.base(t[ok] - n[ok])
        return out

    def multiplier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return dtft_symbol(self.coeffs, self.n0, xi)

    def fourier(self, xi):
        return self.multiplier(xi) * self.base.fourier(xi)


class SampledScaling:
    """Scaling function known only through samples.

    ``fourier`` is the Riemann-sum DTFT inside the Nyquist band and zero
    outside it; point evaluation is band-limited interpolation.
    """

    def __init__(self, signal: SampledSignal):
        self.signal = signal

    @property
    def support(self):
        return (self.signal.t0, self.signal.t_end + self.signal.dt)

    breakpoints = None

    def __call__(self, t):
        return bandlimited_interp(self.signal, t)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        s = self.signal
        vals = s.dt * (np.exp(-1j * np.multiply.outer(xi, s.t)) @ s.samples)
        return np.where(np.abs(xi) <= np.pi / s.dt, vals, 0.0)


def as_scaling(phi):
    if isinstance(phi, SampledSignal):
        return SampledScaling(phi)
    if not (callable(phi) and hasattr(phi, "fourier") and hasattr(phi, "support")):
        raise TypeError("scaling function needs __call__, fourier and support")
    return phi


def _validate(m: ParameterMatrix):
    m.require_valid(allow_b_zero=True)
    if m.B == 0:
        raise DegenerateBError("the multiresolution analysis needs B != 0")


def scaling_system_values(phi, m: ParameterMatrix, j: int, k, t):
    """``phi_{j,k}(t) = 2^(j/2) phi(2^j t - k) exp{-i/(2B)(A t^2 + D p^2 - A k^2)}``."""
    A, B, D, p = m.A, m.B, m.D, m.p
    t = np.asarray(t, dtype=float)
    k = np.asarray(k, dtype=float)
    return (
        2.0 ** (j / 2)
        * as_scaling(phi)(2.0**j * t - k)
        * np.exp(-0.5j * (A * t**2 + D * p**2 - A * k**2) / B)
    )


@dataclass(frozen=True)
class ScalingSystem:
    phi: object
    matrix: ParameterMatrix
    j: int = 0

    def translate(self, k, t):
        return scaling_system_values(self.phi, self.matrix, self.j, k, t)


# -- Riesz sums --------------------------------------------------------------------------


@dataclass(frozen=True)
class RieszReport:
    a1: float
    a2: float
    n_omega: int
    n_k: int
    values: np.ndarray | None = None

    @property
    def is_riesz(self):
        return self.a1 > 1e-8 and np.isfinite(self.a2)


def reduced_grid(m: ParameterMatrix, n_omega: int):
    """``xi = (w - p)/B`` for ``n_omega`` points of ``w`` on ``[0, 2 pi B]``."""
    omega = np.linspace(0.0, 2 * np.pi * m.B, n_omega, endpoint=False)
    return (omega - m.p) / m.B


def periodized_sum(func, xi, tol=1e-12, k_start=8, k_max=2**16):
    """``sum_k func(xi + 2 pi k)`` with adaptive truncation.

    Partial sums over ``|k| <= K`` are doubled in ``K`` until the increment
    falls below ``tol``; slowly decaying tails are accelerated by Richardson
    extrapolation in ``1/K``. Returns ``(value, K)``.
    """
    xi = np.asarray(xi, dtype=float)

    def band(k_lo, k_hi):
        ks = np.arange(k_lo, k_hi + 1, dtype=float)
        pos = func(xi[:, None] + 2 * np.pi * ks[None, :]).sum(axis=1)
        neg = func(xi[:, None] - 2 * np.pi * ks[None, :]).sum(axis=1)
        return pos + neg

    K = k_start
    partial = func(xi) + band(1, K)
    table = [partial]
    while K < k_max:
        nxt = table[-1] + band(K + 1, 2 * K)
        K *= 2
        if np.max(np.abs(nxt - table[-1])) < tol:
            return nxt, K
        table.append(nxt)
        # Richardson: remove successive powers of 1/K from the last few sums
        rich = [table[i] for i in range(max(0, len(table) - 6), len(table))]
        for order in range(1, len(rich)):
            fac = 2.0**order
            rich = [(fac * rich[i + 1] - rich[i]) / (fac - 1) for i in range(len(rich) - 1)]
            if len(rich) >= 2 and np.max(np.abs(rich[-1] - rich[-2])) < tol:
                return rich[-1], K
    raise TailNotConvergedError(f"periodization did not converge to {tol:g} with |k| <= {k_max}")


def riesz_sum(phi, xi, tol=1e-12, k_max=2**16):
    phi = as_scaling(phi)
    return periodized_sum(lambda x: np.abs(phi.fourier(x)) ** 2, xi, tol=tol, k_max=k_max)


def riesz_check(phi, m: ParameterMatrix, n_omega: int = 512, n_k: int | None = None, tol=1e-12):
    """Riesz bounds ``a1 = min G``, ``a2 = max G`` over ``w`` in ``[0, 2 pi B]``.

    ``G(w) = sum_k |phi_hat((w - p)/B + 2 pi k)|^2``. With ``n_k`` given the
    sum is truncated at ``|k| <= n_k``; otherwise the truncation is adaptive
    (see :func:`periodized_sum`).
    """
    _validate(m)
    phi = as_scaling(phi)
    xi = reduced_grid(m, n_omega)
    if n_k is None:
        G, used = riesz_sum(phi, xi, tol=tol)
    else:
        ks = np.arange(-n_k, n_k + 1)
        G = np.sum(np.abs(phi.fourier(xi[:, None] + 2 * np.pi * ks[None, :])) ** 2, axis=1)
        used = n_k
    G = np.real(G)
    return RieszReport(float(G.min()), float(G.max()), n_omega, int(used), G)


def autocorrelation_symbol(phi, xi, n_quad=2**14):
    """``sum_n a[n] exp(-i n xi)`` with ``a[n] = integral phi(t) conj(phi(t - n)) dt``.

    Poisson-summation oracle for :func:`riesz_sum` when ``phi`` has compact support.
    """
    phi = as_scaling(phi)
    lo, hi = phi.support
    span = int(np.ceil(hi - lo))
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, complex)
    for n in range(-span, span + 1):
        a_n = _inner_on(phi, lambda t, n=n: phi(t - n), max(lo, lo + n), min(hi, hi + n), n_quad)
        out += a_n * np.exp(-1j * n * xi)
    return out


def _panels(phi, lo, hi, n_quad):
    """Midpoint nodes on [lo, hi], split at the breakpoints of ``phi`` when known."""
    bp = getattr(phi, "breakpoints", None)
    cuts = [lo, hi]
    if bp is not None:
        bp = np.asarray(bp, dtype=float)
        cuts = np.unique(np.concatenate([[lo, hi], bp[(bp > lo) & (bp < hi)]]))
    nodes, weights = [], []
    per = max(16, n_quad // max(1, len(cuts) - 1))
    for a, b in zip(cuts[:-1], cuts[1:]):
        h = (b - a) / per
        nodes.append(a + h * (np.arange(per) + 0.5))
        weights.append(np.full(per, h))
    return np.concatenate(nodes), np.concatenate(weights)


def _inner_on(phi, other, lo, hi, n_quad):
    if hi <= lo:
        return 0.0 + 0j
    t, w = _panels(phi, lo, hi, n_quad)
    return complex(np.sum(w * phi(t) * np.conj(other(t))))


# -- orthonormalization -------------------------------------------------------------------


def orthonormalize(phi, m: ParameterMatrix, n_fft: int = 1024, coeff_tol=1e-15, floor=1e-8):
    """Divide ``phi_hat`` by ``sqrt(G)`` and return the orthonormal generator.

    The multiplier ``G^(-1/2)`` is sampled on ``n_fft`` points of one period,
    its Fourier coefficients are taken with an FFT and trimmed below
    ``coeff_tol``.
    """
    _validate(m)
    phi = as_scaling(phi)
    xi = 2 * np.pi * np.arange(n_fft) / n_fft
    G = np.real(riesz_sum(phi, xi)[0])
    if G.min() <= floor:
        raise RieszBoundError(f"lower Riesz bound {G.min():.3g} is too small to orthonormalize")
    # E(xi) = sum_n e[n] exp(-i n xi); e[n] = mean(G^-1/2 exp(i n xi))
    e = np.fft.fft(G**-0.5) / n_fft
    n = np.fft.fftfreq(n_fft, 1.0 / n_fft).astype(int)
    order = np.argsort(n)
    n, e = n[order], e[order]
    keep = np.abs(e) > coeff_tol
    lo, hi = np.flatnonzero(keep)[[0, -1]]
    coeffs = e[lo : hi + 1]
    if np.max(np.abs(coeffs.imag)) < 1e-15:
        coeffs = coeffs.real + 0j
    if coeffs.size == 1 and abs(coeffs[0] - 1) < 1e-12:
        return phi
    return OrthonormalizedScaling(phi, coeffs, int(n[lo]))


# -- filters -------------------------------------------------------------------------------


@dataclass(frozen=True)
class FilterPair:
    """Low-pass and wavelet filters; ``c[i]`` is tap ``k0 + i`` and ``d[i]`` tap ``kd0 + i``."""

    c: np.ndarray
    d: np.ndarray
    c_mod: np.ndarray
    d_mod: np.ndarray
    matrix: ParameterMatrix
    k0: int = 0
    kd0: int = 0

    @property
    def c_index(self):
        return self.k0 + np.arange(self.c.size)

    @property
    def d_index(self):
        return self.kd0 + np.arange(self.d.size)

    def to_dict(self):
        def rows(vals, idx):
            return [{"k": int(k), "re": float(v.real), "im": float(v.imag)} for k, v in zip(idx, vals)]

        return {
            "matrix": self.matrix.to_dict(),
            "c": rows(self.c, self.c_index),
            "d": rows(self.d, self.d_index),
        }

    @classmethod
    def from_dict(cls, data):
        m = ParameterMatrix.from_dict(data["matrix"])

        def unpack(rows):
            rows = sorted(rows, key=lambda r: r["k"])
            k = np.array([r["k"] for r in rows])
            if np.any(np.diff(k) != 1):
                raise ValueError("filter taps must be consecutive")
            return np.array([r["re"] + 1j * r["im"] for r in rows]), int(k[0])

        c, k0 = unpack(data["c"])
        d, kd0 = unpack(data["d"])
        return make_filter_pair(c, d, m, k0, kd0)


def chirp_taps(k, m: ParameterMatrix):
    """``exp(i A k^2 / 2B)``."""
    k = np.asarray(k, dtype=float)
    return np.exp(0.5j * m.A * k**2 / m.B)


def make_filter_pair(c, d, m: ParameterMatrix, k0=0, kd0=0) -> FilterPair:
    c = np.asarray(c, dtype=complex)
    d = np.asarray(d, dtype=complex)
    kc = k0 + np.arange(c.size)
    kd = kd0 + np.arange(d.size)
    return FilterPair(c, d, c * chirp_taps(kc, m), d * chirp_taps(kd, m), m, k0, kd0)


def lowpass_filter(phi, m: ParameterMatrix, n_taps: int | None = None, n_quad: int = 2**16,
                   k0: int | None = None, refine_tol=1e-3, return_residual=False):
    """Two-scale coefficients ``c[k] = <phi_{0,0}, phi_{1,k}>`` by quadrature.

    The inner-product formula only holds for an orthonormal generator; pass
    the output of :func:`orthonormalize` for a general Riesz basis.

    Midpoint panels (split at known breakpoints) are evaluated at ``n_quad``
    and ``n_quad/2`` nodes and combined by one Richardson step. The residual
    of ``phi_hat(xi) = 2^(-1/2) C0(xi/2) phi_hat(xi/2)`` with
    ``C0(xi) = sum_k c_mod[k] exp(-i k xi)`` is checked on a frequency grid.

    Returns
    -------
    c : ndarray
        Taps ``k0, k0 + 1, ...`` (trailing zeros trimmed).
    k0 : int
    residual : float, only when ``return_residual``
    """
    _validate(m)
    phi = as_scaling(phi)
    lo, hi = phi.support
    if k0 is None:
        k0 = int(np.floor(2 * lo - hi))
    if n_taps is None:
        n_taps = int(np.ceil(2 * hi - lo)) - k0 + 1
    ks = k0 + np.arange(n_taps)
    f00 = lambda t: scaling_system_values(phi, m, 0, 0, t)
    c = np.empty(n_taps, complex)
    for i, k in enumerate(ks):
        f1k = lambda t, k=k: scaling_system_values(phi, m, 1, k, t)
        a = max(lo, (lo + k) / 2)
        b = min(hi, (hi + k) / 2)
        if b <= a:
            c[i] = 0
            continue
        fine = _chirped_inner(phi, f00, f1k, a, b, n_quad, k)
        coarse = _chirped_inner(phi, f00, f1k, a, b, n_quad // 2, k)
        c[i] = (4 * fine - coarse) / 3
    c[np.abs(c) < 1e-14] = 0
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise NotRefinableError("all two-scale coefficients vanish")
    c = c[nz[0] : nz[-1] + 1]
    k0 = int(ks[nz[0]])
    res = two_scale_residual(phi, c, k0, m)
    if res > refine_tol:
        raise NotRefinableError(f"two-scale residual {res:.3g} exceeds {refine_tol:g}")
    return (c, k0, res) if return_residual else (c, k0)


def _chirped_inner(phi, f, g, lo, hi, n_quad, k):
    bp = getattr(phi, "breakpoints", None)
    cuts = [lo, hi]
    if bp is not None:
        bp = np.asarray(bp, dtype=float)
        extra = np.concatenate([bp, (bp + k) / 2])
        cuts = np.unique(np.concatenate([[lo, hi], extra[(extra > lo) & (extra < hi)]]))
    total = 0j
    per = max(16, n_quad // max(1, len(cuts) - 1))
    for a, b in zip(cuts[:-1], cuts[1:]):
        h = (b - a) / per
        t = a + h * (np.arange(per) + 0.5)
        total += h * np.sum(f(t) * np.conj(g(t)))
    return total


def two_scale_residual(phi, c, k0, m: ParameterMatrix, n_xi=513, xi_max=8 * np.pi):
    phi = as_scaling(phi)
    xi = np.linspace(-xi_max, xi_max, n_xi)
    ks = k0 + np.arange(len(c))
    cm = np.asarray(c) * chirp_taps(ks, m)
    C0 = dtft_symbol(cm, k0, xi / 2)
    lhs = phi.fourier(xi)
    rhs = C0 * phi.fourier(xi / 2) / np.sqrt(2)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


def wavelet_filter(c, m: ParameterMatrix, k0: int = 0):
    """Wavelet filter from the low-pass taps.

    Modulated rule ``d_mod[k] = (-1)^(1-k) conj(c_mod[1-k]) exp(-i p / 2B)``,
    then ``d[k] = d_mod[k] exp(-i A k^2 / 2B)``.

    Returns
    -------
    d, d_mod : ndarray
    kd0 : int
        Index of the first tap (``1 - (last index of c)``).
    """
    _validate(m)
    c = np.asarray(c, dtype=complex).ravel()
    if c.size == 0:
        raise ValueError("wavelet_filter needs a non-empty c")
    kc = k0 + np.arange(c.size)
    c_mod = c * chirp_taps(kc, m)
    kd = 1 - kc[::-1]
    sign = np.where((1 - kd) % 2 == 0, 1.0, -1.0)
    d_mod = sign * np.conj(c_mod[::-1]) * np.exp(-0.5j * m.p / m.B)
    d = d_mod * np.conj(chirp_taps(kd, m))
    return d, d_mod, int(kd[0])


def wavelet_filter_alt(c, m: ParameterMatrix, k0: int = 0):
    """Alternative closed rule ``d[k] = (-1)^(1-k) conj(c[1-k]) exp{i/(2B)(A(1-2k) - p)}``.

    Kept for comparison reports only; it is not used to build filter pairs
    because it breaks the alternation identity whenever ``A != 0``.
    """
    c = np.asarray(c, dtype=complex).ravel()
    kc = k0 + np.arange(c.size)
    kd = 1 - kc[::-1]
    sign = np.where((1 - kd) % 2 == 0, 1.0, -1.0)
    d = sign * np.conj(c[::-1]) * np.exp(0.5j * (m.A * (1 - 2 * kd) - m.p) / m.B)
    return d, int(kd[0])


def build_filter_pair(phi, m: ParameterMatrix, **kw) -> FilterPair:
    c, k0 = lowpass_filter(phi, m, **kw)
    d, _, kd0 = wavelet_filter(c, m, k0)
    return make_filter_pair(c, d, m, k0, kd0)


def classical_haar_pair(m: ParameterMatrix | None = None) -> FilterPair:
    """Textbook Haar taps ``c = (1, 1)/sqrt(2)``, ``d = (-1, 1)/sqrt(2)``."""
    from .params import fourier

    m = fourier() if m is None else m
    s = 1 / np.sqrt(2)
    return FilterPair(
        np.array([s, s], complex), np.array([-s, s], complex),
        np.array([s, s], complex), np.array([-s, s], complex), m, 0, 0,
    )


def dtft_symbol(taps, k0, xi):
    """``sum_i taps[i] exp(-i (k0 + i) xi)`` by Horner's rule in ``exp(-i xi)``."""
    xi = np.asarray(xi, dtype=float)
    z = np.exp(-1j * xi)
    return np.exp(-1j * k0 * xi) * np.polyval(np.asarray(taps, dtype=complex)[::-1], z)


@dataclass(frozen=True)
class QMFReport:
    lowpass: float
    highpass: float
    alternation: float
    matrix: float

    @property
    def worst(self):
        return max(self.lowpass, self.highpass, self.matrix)

    def as_dict(self):
        return {"lowpass": self.lowpass, "highpass": self.highpass,
                "alternation": self.alternation, "matrix": self.matrix}


def qmf_identity_check(fp: FilterPair, n_xi: int = 512) -> QMFReport:
    """QMF sums, alternation sum and ``M M^* - 2I`` on ``n_xi`` points of ``[0, 2 pi)``.

    ``M(xi) = [[C0(xi), C0(xi + pi)], [C1(xi), C1(xi + pi)]]`` with the DTFT
    symbols of the modulated taps.
    """
    if fp.c.size == 0 or fp.d.size == 0:
        raise QMFError("empty filter pair")
    xi = 2 * np.pi * np.arange(n_xi) / n_xi
    C0, C0p = dtft_symbol(fp.c_mod, fp.k0, xi), dtft_symbol(fp.c_mod, fp.k0, xi + np.pi)
    C1, C1p = dtft_symbol(fp.d_mod, fp.kd0, xi), dtft_symbol(fp.d_mod, fp.kd0, xi + np.pi)
    low = np.max(np.abs(np.abs(C0) ** 2 + np.abs(C0p) ** 2 - 2))
    high = np.max(np.abs(np.abs(C1) ** 2 + np.abs(C1p) ** 2 - 2))
    alt = np.max(np.abs(C0 * np.conj(C1) + C0p * np.conj(C1p)))
    M = np.stack([np.stack([C0, C0p], -1), np.stack([C1, C1p], -1)], -2)
    MM = M @ np.conj(np.swapaxes(M, -1, -2))
    mat = np.max(np.abs(MM - 2 * np.eye(2)))
    return QMFReport(float(low), float(high), float(alt), float(mat))


def biorthogonality_check(phi, psi, m: ParameterMatrix, n_omega=512, tol=1e-12):
    """``max_w |sum_k phi_hat(xi + 2 pi k) conj(psi_hat(xi + 2 pi k))|`` with ``xi = (w - p)/B``."""
    _validate(m)
    phi, psi = as_scaling(phi), as_scaling(psi)
    xi = reduced_grid(m, n_omega)
    val, used = periodized_sum(lambda x: phi.fourier(x) * np.conj(psi.fourier(x)), xi, tol=tol)
    return Residual(float(np.max(np.abs(val))), "absolute", {"n_k": used})


# -- Haar wavelet -----------------------------------------------------------------------


class ModulatedWavelet:
    """``psi(t) = sqrt(2) exp{-i/(2B)(A t^2 + D p^2)} sum_k d_mod[k] phi(2t - k)``.

    ``fourier`` returns the transform of the unchirped part
    ``sqrt(2) sum_k d_mod[k] phi(2t - k)``, which is what enters the
    periodized sums.
    """

    def __init__(self, phi, fp: FilterPair):
        self.phi = as_scaling(phi)
        self.fp = fp

    @property
    def support(self):
        lo, hi = self.phi.support
        ks = self.fp.d_index
        return ((lo + ks[0]) / 2, (hi + ks[-1]) / 2)

    def unchirped(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, complex)
        for dk, k in zip(self.fp.d_mod, self.fp.d_index):
            out += dk * self.phi(2 * t - k)
        return np.sqrt(2) * out

    def __call__(self, t):
        m = self.fp.matrix
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5j * (m.A * t**2 + m.D * m.p**2) / m.B) * self.unchirped(t)

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return dtft_symbol(self.fp.d_mod, self.fp.kd0, xi / 2) * self.phi.fourier(xi / 2) / np.sqrt(2)


def build_haar_system(m: ParameterMatrix, t_min=-0.25, t_max=1.25, n=6001):
    """Haar scaling system and its chirp-modulated wavelet sampled on a dense grid.

    Returns
    -------
    system : ScalingSystem
    wavelet : SampledSignal
    filters : FilterPair
    """
    _validate(m)
    phi = haar_scaling()
    fp = build_filter_pair(phi, m)
    w = ModulatedWavelet(phi, fp)
    t0, dt = t_min, (t_max - t_min) / (n - 1)
    t = t0 + dt * np.arange(n)
    return ScalingSystem(phi, m, 0), SampledSignal(t0, dt, w(t)), fp


def reference_haar_wavelet(t):
    """Haar wavelet in the sign convention produced by :func:`wavelet_filter`: -1 then +1."""
    t = np.asarray(t, dtype=float)
    return np.where((t >= 0) & (t < 0.5), -1.0, 0.0) + np.where((t >= 0.5) & (t < 1), 1.0, 0.0)


# -- DWT ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class DwtPyramid:
    approx: np.ndarray
    details: list
    levels: int
    filter: FilterPair

    @property
    def size(self):
        return self.approx.size + sum(d.size for d in self.details)


def _analysis(x, taps, k0):
    n = x.size
    half = np.arange(n // 2)
    out = np.zeros(n // 2, complex)
    for tap, k in zip(taps, k0 + np.arange(len(taps))):
        out += np.conj(tap) * x[(2 * half + k) % n]
    return out


def _synthesis(coef, taps, k0, n):
    out = np.zeros(n, complex)
    half = np.arange(coef.size)
    for tap, k in zip(taps, k0 + np.arange(len(taps))):
        np.add.at(out, (2 * half + k) % n, tap * coef)
    return out


def dwt(x, fp: FilterPair, levels: int, qmf_tol=1e-6) -> DwtPyramid:
    """Critically sampled periodic two-channel analysis over ``levels`` levels.

    ``approx[n] = sum_k conj(c_mod[k]) x[(2n + k) mod N]`` and likewise with
    ``d_mod`` for details. The same filters serve every level; ``details[0]``
    is the finest level.
    """
    x = np.asarray(x, dtype=complex).ravel()
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if x.size % (2**levels):
        raise ValueError(f"length {x.size} is not divisible by 2^{levels}")
    rep = qmf_identity_check(fp)
    if max(rep.worst, rep.alternation) > qmf_tol:
        raise QMFError(f"filter pair fails the QMF conditions (worst residual {max(rep.worst, rep.alternation):.3g})")
    details = []
    a = x
    for _ in range(levels):
        details.append(_analysis(a, fp.d_mod, fp.kd0))
        a = _analysis(a, fp.c_mod, fp.k0)
    return DwtPyramid(a, details, levels, fp)


def idwt(p: DwtPyramid) -> np.ndarray:
    """Synthesis adjoint of :func:`dwt`."""
    if len(p.details) != p.levels:
        raise ValueError("pyramid has the wrong number of detail bands")
    a = np.asarray(p.approx, dtype=complex)
    fp = p.filter
    for d in reversed(p.details):
        d = np.asarray(d, dtype=complex)
        if d.size != a.size:
            raise ValueError("inconsistent pyramid shapes")
        n = 2 * a.size
        a = _synthesis(a, fp.c_mod, fp.k0, n) + _synthesis(d, fp.d_mod, fp.kd0, n)
    return a


# -- density diagnostic -----------------------------------------------------------------------


def density_diagnostic(phi, m: ParameterMatrix, f: SampledSignal, j_max: int, j_min: int = 0):
    """``sum_k |<f, phi_{j,k}>|^2 / ||f||^2`` for ``j = j_min ... j_max``.

    Inner products are Riemann sums on the grid of ``f``; with an orthonormal
    ``phi`` these are projection energies onto ``V_j``.
    """
    _validate(m)
    phi = as_scaling(phi)
    if f.dt * 2.0**j_max > 0.5:
        raise ValueError(
            f"grid step {f.dt:g} is too coarse for level {j_max}: "
            f"need at least two samples per cell of width 2^-{j_max}"
        )
    lo, hi = phi.support
    t = f.t
    energy = f.energy()
    if energy == 0:
        return [0.0] * (j_max - j_min + 1)
    out = []
    for j in range(j_min, j_max + 1):
        s = 2.0**j
        ks = np.arange(int(np.floor(s * t[0] - hi)) - 1, int(np.ceil(s * t[-1] - lo)) + 2)
        total = 0.0
        for k in ks:
            i0 = max(0, int(np.floor(((lo + k) / s - f.t0) / f.dt)) - 1)
            i1 = min(f.n, int(np.ceil(((hi + k) / s - f.t0) / f.dt)) + 2)
            if i1 <= i0:
                continue
            tt = t[i0:i1]
            vals = scaling_system_values(phi, m, j, k, tt)
            total += abs(f.dt * np.vdot(vals, f.samples[i0:i1])) ** 2
        out.append(total / energy)
    return out
