"""Invertible per-mode matrices defining the transformed (QT) domain."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeMismatch
from .quaternion import QTensor
from .tensor_ops import mode_n_product

KINDS = ("identity", "dct", "rand", "user")


def make_dct(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix, rows indexed by frequency."""
    if n < 1:
        raise DomainError("DCT size must be >= 1")
    p = np.arange(n)[:, None]
    q = np.arange(n)[None, :]
    C = np.cos(np.pi * (2 * q + 1) * p / (2 * n))
    scale = np.full((n, 1), np.sqrt(2.0 / n))
    scale[0] = np.sqrt(1.0 / n)
    return scale * C


def make_random_orthogonal(n: int, seed: int = 0) -> np.ndarray:
    """Q factor of a seeded Gaussian matrix, signs fixed so diag(R) > 0."""
    if n < 1:
        raise DomainError("matrix size must be >= 1")
    G = np.random.default_rng(seed).standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s


@dataclass(frozen=True)
class TransformSet:
    """Matrices ``M_3 .. M_N`` (stored in that order) and their inverses."""

    kind: str
    matrices: tuple
    inverses: tuple = field(repr=False)
    seed: int | None = None

    @classmethod
    def build(cls, kind: str, sizes, seed: int = 0) -> "TransformSet":
        """One matrix per trailing mode; ``sizes`` are the extents of modes 3..N."""
        sizes = [int(s) for s in sizes]
        if kind == "identity":
            mats = [np.eye(s) for s in sizes]
            return cls(kind, tuple(mats), tuple(mats))
        if kind == "dct":
            mats = [make_dct(s) for s in sizes]
            return cls(kind, tuple(mats), tuple(m.T for m in mats))
        if kind in ("rand", "random_orthogonal"):
            mats = [make_random_orthogonal(s, seed + i) for i, s in enumerate(sizes)]
            return cls("rand", tuple(mats), tuple(m.T for m in mats), seed=seed)
        raise DomainError(f"unknown transform kind {kind!r}; expected one of {KINDS}")

    @classmethod
    def for_tensor(cls, kind: str, shape, seed: int = 0) -> "TransformSet":
        return cls.build(kind, tuple(shape)[2:], seed)

    @classmethod
    def user(cls, matrices) -> "TransformSet":
        mats = [np.asarray(m, dtype=np.float64) for m in matrices]
        for m in mats:
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ShapeMismatch(f"transform matrices must be square, got {m.shape}")
        invs = [np.linalg.inv(m) for m in mats]
        return cls("user", tuple(mats), tuple(invs))

    @property
    def sizes(self) -> tuple:
        return tuple(m.shape[0] for m in self.matrices)

    def is_orthonormal(self, tol: float = 1e-12) -> bool:
        return all(np.linalg.norm(m.T @ m - np.eye(m.shape[0])) <= tol for m in self.matrices)

    def check(self, shape):
        if tuple(shape)[2:] != self.sizes:
            raise ShapeMismatch(f"transform sizes {self.sizes} do not match trailing dims of {tuple(shape)}")


def apply(T: QTensor, S: TransformSet, direction: str = "forward") -> QTensor:
    """Chain ``x_3 M_3 x_4 M_4 ...`` (forward) or the inverses."""
    S.check(T.shape)
    if direction == "forward":
        mats = S.matrices
    elif direction == "inverse":
        mats = S.inverses
    else:
        raise DomainError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    out = T
    for i, M in enumerate(mats):
        if S.kind == "identity":
            continue
        out = mode_n_product(out, M, i + 3)
    return out


def forward(T: QTensor, S: TransformSet) -> QTensor:
    return apply(T, S, "forward")


def inverse(T: QTensor, S: TransformSet) -> QTensor:
    return apply(T, S, "inverse")
