"""Quaternion tensor algebra and non-convex low-rank recovery."""
from .errors import (
    DomainError,
    InvalidProblem,
    MixedDimensions,
    ModeOutOfRange,
    NotPowerOfTwo,
    NumericalFailure,
    QTLRError,
    ShapeMismatch,
    TooSmall,
    UnreadableFile,
)
from .quaternion import Quaternion, QTensor, conj, fro_norm, inner, linf_norm, modulus, qmul
from .qlinalg import (
    QSVDResult,
    complex_adjoint,
    conj_transpose,
    is_unitary,
    nuclear_norm,
    qmatmul,
    qsvd,
    unitarity_error,
)
from .tensor_ops import fold, ket_augment, ket_inverse, mode_n_product, tt_fold, tt_unfold, unfold
from .transforms import TransformSet
from .qtproduct import qt_product, qt_rank, qt_svd, qtnn
from .surrogates import ProxConfig, Surrogate, lrqa_prox, qt_prox, scalar_prox, shrink
from .solvers import (
    AdmmSchedule,
    CompletionProblem,
    RpcaProblem,
    SolverReport,
    auto_lambda,
    beta_schedule_check,
    kkt_residuals,
    lrqtc_nctr,
    lrqtc_ncttr,
    trpca_nc,
)
from .metrics import psnr, ssim

__version__ = "0.1.0"
