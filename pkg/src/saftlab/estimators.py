"""scikit-learn style wrappers over the functional core.

Each row of ``X`` is one uniformly sampled complex signal; ``dt`` and ``t0``
describe the shared time grid.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import samra, sawt
from ._validation import check_positive, check_signals
from .params import ParameterMatrix
from .saft import omega_grid, saft_forward, saft_inverse
from .signals import SampledSignal, SpectrumSignal


class _MatrixMixin:
    def _matrix(self):
        return ParameterMatrix(self.A, self.B, self.C, self.D, self.p, self.q).require_valid()


class SpecialAffineFourier(_MatrixMixin, TransformerMixin, BaseEstimator):
    """Row-wise SAFT.

    Parameters
    ----------
    A, B, C, D, p, q : float
        Parameter matrix; defaults to the ordinary Fourier case.
    dt, t0 : float
        Sample interval and first sample time of every row.

    Attributes
    ----------
    matrix_ : ParameterMatrix
    omega_ : ndarray
        Frequency grid of the transformed rows.
    """

    def __init__(self, A=0.0, B=1.0, C=-1.0, D=0.0, p=0.0, q=0.0, dt=1.0, t0=0.0):
        self.A, self.B, self.C, self.D, self.p, self.q = A, B, C, D, p, q
        self.dt = dt
        self.t0 = t0

    def fit(self, X, y=None):
        X = check_signals(X)
        check_positive(self.dt, "dt")
        self.matrix_ = self._matrix()
        self.n_samples_ = X.shape[1]
        omega0, domega = omega_grid(self.n_samples_, self.dt, self.matrix_)
        self.omega_ = omega0 + domega * np.arange(self.n_samples_)
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_signals(X, self.n_samples_)
        return np.vstack([
            saft_forward(SampledSignal(self.t0, self.dt, row), self.matrix_, check=False).samples for row in X
        ])

    def inverse_transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_signals(X, self.n_samples_)
        omega0, domega = self.omega_[0], self.omega_[1] - self.omega_[0]
        return np.vstack([
            saft_inverse(SpectrumSignal(self.matrix_, omega0, domega, row, self.t0, self.dt)).samples
            for row in X
        ])


class SpecialAffineWaveletTransform(_MatrixMixin, TransformerMixin, BaseEstimator):
    """Row-wise wavelet transform with a Morlet mother wavelet.

    ``transform`` returns flattened scalograms of shape
    ``(n_signals, len(b_grid) * len(a_grid))`` in C order (b major).
    """

    def __init__(self, A=0.0, B=1.0, C=-1.0, D=0.0, p=0.0, q=0.0, dt=1.0, t0=0.0,
                 gamma=5.0, b_grid=None, a_grid=None, a_min=1e-3, a_max=1e3, n_a=256, n_jobs=None):
        self.A, self.B, self.C, self.D, self.p, self.q = A, B, C, D, p, q
        self.dt = dt
        self.t0 = t0
        self.gamma = gamma
        self.b_grid = b_grid
        self.a_grid = a_grid
        self.a_min = a_min
        self.a_max = a_max
        self.n_a = n_a
        self.n_jobs = n_jobs

    def _grids(self):
        b = np.linspace(-12, 12, 128) if self.b_grid is None else np.asarray(self.b_grid, float)
        a = np.geomspace(1 / 16, 16, 64) if self.a_grid is None else np.asarray(self.a_grid, float)
        return b, a

    def fit(self, X, y=None):
        X = check_signals(X)
        check_positive(self.dt, "dt")
        self.matrix_ = self._matrix()
        self.n_samples_ = X.shape[1]
        self.wavelet_ = sawt.Morlet(self.gamma)
        self.b_grid_, self.a_grid_ = self._grids()
        self.admissibility_ = sawt.admissibility(
            self.wavelet_, self.matrix_, self.a_min, self.a_max, self.n_a
        )
        self.c_psi_ = self.admissibility_.c_psi
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_signals(X, self.n_samples_)
        out = []
        for row in X:
            W = sawt.sawt_forward(
                SampledSignal(self.t0, self.dt, row), self.wavelet_, self.b_grid_, self.a_grid_,
                self.matrix_, n_jobs=self.n_jobs,
            )
            out.append(W.coefficients.ravel())
        return np.vstack(out)

    def inverse_transform(self, X):
        check_is_fitted(self, "matrix_")
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            X = X[None, :]
        shape = (self.b_grid_.size, self.a_grid_.size)
        if X.shape[1] != shape[0] * shape[1]:
            raise ValueError(f"expected {shape[0] * shape[1]} coefficients per row, got {X.shape[1]}")
        grid = SampledSignal(self.t0, self.dt, np.zeros(self.n_samples_))
        rows = []
        for row in X:
            W = sawt.ScalogramMap(self.b_grid_, self.a_grid_, row.reshape(shape), self.matrix_)
            rows.append(sawt.sawt_inverse(W, self.wavelet_, self.admissibility_, grid, n_jobs=self.n_jobs).samples)
        return np.vstack(rows)


class SpecialAffineDWT(_MatrixMixin, TransformerMixin, BaseEstimator):
    """Row-wise chirp-modulated Haar DWT.

    ``transform`` packs ``[approx, detail_L, ..., detail_1]`` into one row of
    the input length.
    """

    def __init__(self, A=0.0, B=1.0, C=-1.0, D=0.0, p=0.0, q=0.0, levels=3):
        self.A, self.B, self.C, self.D, self.p, self.q = A, B, C, D, p, q
        self.levels = levels

    def fit(self, X, y=None):
        X = check_signals(X)
        if int(self.levels) < 1:
            raise ValueError("levels must be >= 1")
        if X.shape[1] % (2 ** int(self.levels)):
            raise ValueError(f"signal length {X.shape[1]} is not divisible by 2^{self.levels}")
        self.matrix_ = self._matrix()
        self.n_samples_ = X.shape[1]
        self.filters_ = samra.build_filter_pair(samra.haar_scaling(), self.matrix_)
        return self

    def transform(self, X):
        check_is_fitted(self, "filters_")
        X = check_signals(X, self.n_samples_)
        rows = []
        for row in X:
            p = samra.dwt(row, self.filters_, int(self.levels))
            rows.append(np.concatenate([p.approx] + p.details[::-1]))
        return np.vstack(rows)

    def inverse_transform(self, X):
        check_is_fitted(self, "filters_")
        X = check_signals(X, self.n_samples_)
        n, L = self.n_samples_, int(self.levels)
        sizes = [n >> L] + [n >> j for j in range(L, 0, -1)]
        cuts = np.cumsum(sizes)[:-1]
        rows = []
        for row in X:
            parts = np.split(row, cuts)
            p = samra.DwtPyramid(parts[0], parts[1:][::-1], L, self.filters_)
            rows.append(samra.idwt(p))
        return np.vstack(rows)
