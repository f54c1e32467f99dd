"""Special affine Fourier and wavelet transforms with a chirp-modulated MRA."""

from .exceptions import (
    AdmissibilityError,
    DegenerateBError,
    GridMismatchError,
    InvalidMatrixError,
    NotRefinableError,
    QMFError,
    SaftlabError,
    TailNotConvergedError,
    TruncationWarning,
)
from .params import ParameterMatrix, ValidationReport, inverse, preset, validate
from .signals import SampledSignal, SpectrumSignal
from .saft import dt_saft, saft_chirp_branch, saft_direct, saft_forward, saft_inverse
from .convolution import ConvolutionResult, Residual, affine_convolve, convolution_theorem_check
from .sawt import (
    AdmissibilityResult,
    DaughterWavelet,
    Morlet,
    ScalogramMap,
    WindowSpec,
    admissibility,
    covariance_checks,
    daughter,
    moyal_check,
    reproducing_kernel,
    sawt_forward,
    sawt_inverse,
    sawt_spectral,
    window_metrics,
)
from .samra import (
    DwtPyramid,
    FilterPair,
    RieszReport,
    ScalingSystem,
    biorthogonality_check,
    build_haar_system,
    density_diagnostic,
    dwt,
    idwt,
    lowpass_filter,
    orthonormalize,
    qmf_identity_check,
    riesz_check,
    wavelet_filter,
)
from .estimators import SpecialAffineDWT, SpecialAffineFourier, SpecialAffineWaveletTransform

__version__ = "0.1.0"
