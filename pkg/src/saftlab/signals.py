"""Sampled signal containers, file IO, band-limited interpolation and generators."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import GridMismatchError, TruncationWarning
from .params import ParameterMatrix

CONTAINMENT_TOL = 1e-10
INTERP_HALF_WIDTH = 16
_KAISER_BETA = 12.0


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Uniformly sampled complex signal ``samples[n] = f(t0 + n*dt)``."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if s.size < 2:
            raise ValueError("a signal needs at least two samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("signal samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.t0 + (self.n - 1) * self.dt

    def energy(self) -> float:
        return float(self.dt * np.sum(np.abs(self.samples) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.energy()))

    def inner(self, other: "SampledSignal") -> complex:
        """``<self, other> = integral of self * conj(other)`` on the shared grid."""
        require_same_grid(self, other)
        return complex(self.dt * np.vdot(other.samples, self.samples))

    def with_samples(self, samples) -> "SampledSignal":
        return SampledSignal(self.t0, self.dt, samples)

    def __call__(self, x):
        return bandlimited_interp(self, x)

    @classmethod
    def from_function(cls, func, t0, dt, n):
        t = t0 + dt * np.arange(n)
        return cls(t0, dt, func(t))


@dataclass(frozen=True, eq=False)
class SpectrumSignal:
    """SAFT-domain samples on the grid ``omega0 + m*domega``.

    ``t0`` and ``dt`` remember the time grid the spectrum came from so the
    inverse can land on the same samples.
    """

    matrix: ParameterMatrix
    omega0: float
    domega: float
    samples: np.ndarray
    t0: float = 0.0
    dt: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if not self.domega > 0:
            raise ValueError(f"domega must be positive, got {self.domega}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def omega(self) -> np.ndarray:
        return self.omega0 + self.domega * np.arange(self.n)

    @property
    def nu(self) -> np.ndarray:
        """Reduced frequency ``(omega - p) / B``."""
        return (self.omega - self.matrix.p) / self.matrix.B

    def energy(self) -> float:
        return float(self.domega * np.sum(np.abs(self.samples) ** 2))

    def inner(self, other: "SpectrumSignal") -> complex:
        if other.n != self.n or not np.isclose(other.omega0, self.omega0) or not np.isclose(
            other.domega, self.domega
        ):
            raise GridMismatchError("spectra live on different frequency grids")
        return complex(self.domega * np.vdot(other.samples, self.samples))


def require_same_grid(f: SampledSignal, g: SampledSignal, rtol=1e-12):
    if f.n != g.n or not np.isclose(f.dt, g.dt, rtol=rtol, atol=0) or not np.isclose(
        f.t0, g.t0, rtol=0, atol=rtol * max(1.0, abs(f.dt) * f.n)
    ):
        raise GridMismatchError(
            f"signals are on different grids: (t0={f.t0}, dt={f.dt}, n={f.n}) vs "
            f"(t0={g.t0}, dt={g.dt}, n={g.n})"
        )


def is_contained(samples, tol=CONTAINMENT_TOL) -> bool:
    """True when the edge samples are below ``tol`` times the peak modulus."""
    mag = np.abs(np.asarray(samples))
    peak = mag.max(initial=0.0)
    if peak == 0:
        return True
    return bool(max(mag[0], mag[-1]) <= tol * peak)


def warn_if_truncated(samples, what="signal", tol=CONTAINMENT_TOL, stacklevel=3) -> bool:
    ok = is_contained(samples, tol)
    if not ok:
        warnings.warn(
            f"{what} does not decay below {tol:g} of its peak at the window edges; "
            "results include truncation error",
            TruncationWarning,
            stacklevel=stacklevel,
        )
    return ok


# -- band-limited interpolation ------------------------------------------------


def _kernel(x):
    w = INTERP_HALF_WIDTH
    taper = np.i0(_KAISER_BETA * np.sqrt(np.clip(1.0 - (x / w) ** 2, 0.0, None)))
    return np.sinc(x) * taper / np.i0(_KAISER_BETA) * (np.abs(x) < w)


def bandlimited_interp(sig: SampledSignal, x) -> np.ndarray:
    """Evaluate ``sig`` at arbitrary times with a Kaiser-windowed sinc.

    Samples outside the stored window are treated as zero. Points that fall
    exactly on the grid return the stored sample.
    """
    x = np.asarray(x, dtype=float)
    u = (x.ravel() - sig.t0) / sig.dt
    base = np.floor(u).astype(np.int64)
    offsets = np.arange(-INTERP_HALF_WIDTH + 1, INTERP_HALF_WIDTH + 1)
    idx = base[:, None] + offsets[None, :]
    weights = _kernel(u[:, None] - idx)
    valid = (idx >= 0) & (idx < sig.n)
    vals = np.where(valid, sig.samples[np.clip(idx, 0, sig.n - 1)], 0.0)
    out = np.sum(weights * vals, axis=1)
    return out.reshape(x.shape)


def evaluate(func, x) -> np.ndarray:
    """Evaluate an analytic callable or a :class:`SampledSignal` at ``x``."""
    if isinstance(func, SampledSignal):
        return bandlimited_interp(func, x)
    return np.asarray(func(np.asarray(x, dtype=float)), dtype=complex)


# -- generators ------------------------------------------------------------------


def time_grid(t_min, t_max, n, endpoint=False):
    if n < 2 or not t_max > t_min:
        raise ValueError("grid needs n >= 2 and t_max > t_min")
    dt = (t_max - t_min) / (n - 1 if endpoint else n)
    return float(t_min), float(dt)


def gaussian(alpha=1.0, beta=1.0, t_min=-8.0, t_max=8.0, n=2048):
    """Samples of ``exp(-(alpha*t + beta*t**2))``."""
    t0, dt = time_grid(t_min, t_max, n)
    return SampledSignal.from_function(lambda t: np.exp(-(alpha * t + beta * t**2)), t0, dt, n)


def chirp(f0=1.0, rate=0.5, width=2.0, t_min=-8.0, t_max=8.0, n=2048):
    """Gaussian-windowed linear chirp ``exp(i(f0 t + rate t^2/2))``."""
    t0, dt = time_grid(t_min, t_max, n)
    return SampledSignal.from_function(
        lambda t: np.exp(1j * (f0 * t + 0.5 * rate * t**2) - 0.5 * (t / width) ** 2), t0, dt, n
    )


def impulse(t_at=0.0, t_min=-8.0, t_max=8.0, n=2048):
    """Discrete unit impulse: one sample of value ``1/dt``."""
    t0, dt = time_grid(t_min, t_max, n)
    s = np.zeros(n, complex)
    s[int(round((t_at - t0) / dt))] = 1.0 / dt
    return SampledSignal(t0, dt, s)


def noise(seed=0, t_min=-8.0, t_max=8.0, n=2048):
    """Complex white Gaussian noise, reproducible from ``seed``."""
    t0, dt = time_grid(t_min, t_max, n)
    rng = np.random.default_rng(seed)
    return SampledSignal(t0, dt, rng.standard_normal(n) + 1j * rng.standard_normal(n))


def random_bandlimited(rng, t_min=-32.0, t_max=32.0, n=4096, n_atoms=6, max_freq=None):
    """Random sum of Gaussian atoms that is contained in time and in band.

    Atom centres, widths and carrier frequencies are drawn so each atom falls
    below ``1e-10`` of its peak at the window edges and below Nyquist.
    """
    t0, dt = time_grid(t_min, t_max, n)
    t = t0 + dt * np.arange(n)
    span = t_max - t_min
    nyq = np.pi / dt
    max_freq = 0.25 * nyq if max_freq is None else max_freq
    out = np.zeros(n, complex)
    for _ in range(n_atoms):
        width = rng.uniform(0.5, min(2.0, span / 20))
        # 7 widths to either edge puts the atom below 1e-10 there
        reach = min(0.15 * span, 0.5 * span - 7.0 * width)
        centre = 0.5 * (t_min + t_max) + rng.uniform(-reach, reach)
        freq = rng.uniform(-max_freq, max_freq) * 0.5
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        out += amp * np.exp(-0.5 * ((t - centre) / width) ** 2 + 1j * freq * t)
    return SampledSignal(t0, dt, out)


# -- file IO ---------------------------------------------------------------------


class SignalFormatError(ValueError):
    """Malformed signal file; message carries the offending line number."""


def _rows_from_csv(text, header):
    reader = csv.reader(io.StringIO(text))
    rows = []
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if lineno == 1:
            if [c.strip() for c in row] != list(header):
                raise SignalFormatError(
                    f"line 1: expected header {','.join(header)!r}, got {','.join(row)!r}"
                )
            continue
        if len(row) != len(header):
            raise SignalFormatError(f"line {lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise SignalFormatError(f"line {lineno}: non-numeric value in {row!r}") from None
    if len(rows) < 2:
        raise SignalFormatError("file needs at least two data rows")
    return np.asarray(rows)


def _uniform_step(axis, name):
    steps = np.diff(axis)
    step = float(np.median(steps))
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * abs(step):
        bad = int(np.argmax(np.abs(steps - step))) + 3
        raise SignalFormatError(f"line {bad}: {name} column is not uniformly increasing")
    return (axis[-1] - axis[0]) / (axis.size - 1)


def read_signal(path) -> SampledSignal:
    data = _read_table(path, ("t", "re", "im"))
    dt = _uniform_step(data[:, 0], "t")
    return SampledSignal(data[0, 0], dt, data[:, 1] + 1j * data[:, 2])


def write_signal(path, sig: SampledSignal, with_abs=False):
    header = ("t", "re", "im", "abs") if with_abs else ("t", "re", "im")
    cols = [sig.t, sig.samples.real, sig.samples.imag]
    if with_abs:
        cols.append(np.abs(sig.samples))
    _write_table(path, header, np.column_stack(cols))


def read_spectrum(path, matrix: ParameterMatrix, t0=None) -> SpectrumSignal:
    data = _read_table(path, ("omega", "re", "im"))
    domega = _uniform_step(data[:, 0], "omega")
    n = data.shape[0]
    dt = abs(matrix.B) * 2 * np.pi / (n * domega)
    if t0 is None:
        t0 = -0.5 * n * dt
    return SpectrumSignal(matrix, data[0, 0], domega, data[:, 1] + 1j * data[:, 2], t0, dt)


def write_spectrum(path, spec: SpectrumSignal):
    _write_table(
        path, ("omega", "re", "im"), np.column_stack([spec.omega, spec.samples.real, spec.samples.imag])
    )


def _read_table(path, header):
    path = Path(path)
    if path.suffix in (".bin", ".f64"):
        raw = np.fromfile(path, dtype="<f8")
        if raw.size % 3:
            raise SignalFormatError(f"{path}: binary size is not a multiple of 3 float64 values")
        return raw.reshape(-1, 3)
    return _rows_from_csv(path.read_text(encoding="utf-8"), header)


def _write_table(path, header, table):
    path = Path(path)
    if path.suffix in (".bin", ".f64"):
        np.ascontiguousarray(table[:, :3], dtype="<f8").tofile(path)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, table, delimiter=",", fmt="%.17g")
