"""Seeded ground-truth generators for low-rank quaternion tensors."""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .quaternion import QTensor
from .qtproduct import qt_product
from .tensor_ops import mode_n_product
from .transforms import TransformSet


def _orthonormal(rng, n, r):
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Q


def tucker_tensor(shape, ranks, seed: int = 0, scale: float = 1.0) -> QTensor:
    """Pure-quaternion tensor ``core x_1 U_1 ... x_N U_N``.

    The core is a random pure quaternion tensor and the factors are real
    with orthonormal columns, so every mode-k unfolding has quaternion rank
    at most ``ranks[k]``. Entries are rescaled to unit RMS times ``scale``.
    """
    if len(shape) != len(ranks):
        raise DomainError("need one rank per mode")
    if any(r < 1 or r > n for r, n in zip(ranks, shape)):
        raise DomainError(f"ranks {tuple(ranks)} do not fit shape {tuple(shape)}")
    rng = np.random.default_rng(seed)
    core = QTensor.pure(*(rng.standard_normal(tuple(ranks)) for _ in range(3)))
    T = core
    for k, (n, r) in enumerate(zip(shape, ranks)):
        T = mode_n_product(T, _orthonormal(rng, n, r), k + 1)
    return _normalise(T, scale)


def tt_tensor(shape, ranks, seed: int = 0, scale: float = 1.0) -> QTensor:
    """Pure-quaternion tensor with TT-ranks ``ranks`` (length ``N - 1``).

    All cores but the last are real; the last is pure quaternion, which keeps
    every entry pure.
    """
    N = len(shape)
    if len(ranks) != N - 1:
        raise DomainError("need N-1 TT ranks")
    rng = np.random.default_rng(seed)
    r = [1] + list(ranks) + [1]
    # left part as a real (I_1 ... I_{N-1}, r_{N-1}) matrix, first index fastest
    left = rng.standard_normal((shape[0], r[1]))
    for k in range(1, N - 1):
        G = rng.standard_normal((r[k], shape[k], r[k + 1]))
        left = np.einsum("ar,rib->aib", left, G).reshape(-1, r[k + 1], order="F")
    last = [rng.standard_normal((r[N - 1], shape[N - 1])) for _ in range(3)]
    comps = [np.zeros(int(np.prod(shape)))] + [(left @ g).ravel(order="F") for g in last]
    return _normalise(QTensor.from_flat(np.stack(comps), shape), scale)


def low_qt_rank_tensor(shape, rank: int, transform: TransformSet | None = None, seed: int = 0,
                       scale: float = 1.0) -> QTensor:
    """``A * B`` under the QT-product with thin random quaternion factors.

    Every transformed frontal slice has quaternion rank at most ``rank``.
    """
    n1, n2 = shape[:2]
    rest = tuple(shape[2:])
    if transform is None:
        transform = TransformSet.build("identity", rest)
    rng = np.random.default_rng(seed)
    A = QTensor(rng.standard_normal((4, n1, rank) + rest))
    B = QTensor(rng.standard_normal((4, rank, n2) + rest))
    return _normalise(qt_product(A, B, transform), scale)


def sparse_corruption(shape, fraction: float, magnitude: float, seed: int = 0):
    """Sparse quaternion tensor and its support mask.

    Exactly ``floor(fraction * size)`` entries are nonzero; each is a
    uniformly random quaternion direction with modulus ``magnitude``.
    """
    if not (0 <= fraction <= 1):
        raise DomainError("fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    size = int(np.prod(shape))
    count = int(np.floor(fraction * size))
    pos = rng.choice(size, size=count, replace=False)
    dirs = rng.standard_normal((4, count))
    dirs *= magnitude / np.linalg.norm(dirs, axis=0)
    flat = np.zeros((4, size))
    flat[:, pos] = dirs
    support = np.zeros(size, dtype=bool)
    support[pos] = True
    return QTensor.from_flat(flat, shape), support.reshape(tuple(shape), order="F")


def dense_perturbation(T: QTensor, level: float, seed: int = 0) -> QTensor:
    """Add iid Gaussian noise of std ``level`` times the RMS entry to the i/j/k parts.

    Turns an exactly low-rank tensor into an approximately low-rank one,
    closer to the spectra of natural image sequences.
    """
    if level < 0:
        raise DomainError("level must be nonnegative")
    rms = np.sqrt(np.sum(T.data**2) / T.size)
    noise = np.random.default_rng(seed).standard_normal(T.data.shape) * (level * rms / np.sqrt(3))
    noise[0] = 0.0
    return QTensor._wrap(T.data + noise)


def _normalise(T: QTensor, scale: float) -> QTensor:
    rms = np.sqrt(np.sum(T.data**2) / T.size)
    return QTensor._wrap(T.data * (scale / rms))
