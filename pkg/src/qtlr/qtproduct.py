"""The QT-product: face-wise products in a transformed domain.

Tensors are ``I_1 x I_2 x I_3 x ... x I_N``; frontal slices are indexed by
the trailing multi-index ``(i_3, ..., i_N)``. Forward transforms act on
modes 3..N, products and SVDs happen slice by slice, then the inverse
transform maps back.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import transforms
from ._parallel import pmap
from .errors import NumericalFailure, ShapeMismatch
from .qlinalg import qmatmul, qsvd
from .quaternion import QTensor
from .transforms import TransformSet


def _slices(shape):
    return list(product(*(range(s) for s in shape[2:])))


def _slice(T: QTensor, idx) -> QTensor:
    return QTensor._wrap(T.data[(slice(None), slice(None), slice(None)) + tuple(idx)])


def facewise_product(A: QTensor, B: QTensor) -> QTensor:
    if A.ndim < 2 or B.ndim < 2:
        raise ShapeMismatch("facewise product needs tensors of order >= 2")
    if A.shape[1] != B.shape[0] or A.shape[2:] != B.shape[2:]:
        raise ShapeMismatch(f"cannot take face-wise product of {A.shape} and {B.shape}")
    return qmatmul(A, B)


def qt_product(A: QTensor, B: QTensor, S: TransformSet) -> QTensor:
    Ah = transforms.forward(A, S)
    Bh = transforms.forward(B, S)
    return transforms.inverse(facewise_product(Ah, Bh), S)


def facewise_conj_transpose(A: QTensor) -> QTensor:
    return QTensor._wrap(np.swapaxes(A.conj().data, 1, 2))


def qt_conj_transpose(A: QTensor, S: TransformSet) -> QTensor:
    return transforms.inverse(facewise_conj_transpose(transforms.forward(A, S)), S)


def qt_identity(J: int, S: TransformSet) -> QTensor:
    """Tensor whose every transformed frontal slice is ``I_J``."""
    trailing = S.sizes
    hat = np.zeros((4, J, J) + trailing)
    hat[0] = np.eye(J).reshape((J, J) + (1,) * len(trailing))
    return transforms.inverse(QTensor._wrap(hat), S)


@dataclass(frozen=True)
class QTSVDResult:
    U: QTensor
    S: QTensor
    V: QTensor
    transform: TransformSet
    singular_values: np.ndarray  # (min(I1, I2), *trailing), transformed domain

    def reconstruct(self) -> QTensor:
        T = self.transform
        return qt_product(qt_product(self.U, self.S, T), qt_conj_transpose(self.V, T), T)


def qt_svd(Q: QTensor, S: TransformSet, workers: int | None = None) -> QTSVDResult:
    if Q.ndim < 3:
        raise ShapeMismatch(f"QT-SVD needs order >= 3, got {Q.ndim}")
    S.check(Q.shape)
    I1, I2 = Q.shape[:2]
    trailing = Q.shape[2:]
    p = min(I1, I2)
    Qh = transforms.forward(Q, S)
    idxs = _slices(Q.shape)

    def one(idx):
        try:
            return qsvd(_slice(Qh, idx), full_matrices=True)
        except NumericalFailure as exc:
            raise NumericalFailure("QSVD failed", slice=idx) from exc

    results = pmap(one, idxs, workers)
    Uh = np.zeros((4, I1, I1) + trailing)
    Vh = np.zeros((4, I2, I2) + trailing)
    Sh = np.zeros((4, I1, I2) + trailing)
    sv = np.zeros((p,) + trailing)
    diag = np.arange(p)
    for idx, r in zip(idxs, results):
        sl = (slice(None), slice(None), slice(None)) + idx
        Uh[sl] = r.U.data
        Vh[sl] = r.V.data
        Sh[(0, diag, diag) + idx] = r.S
        sv[(slice(None),) + idx] = r.S
    return QTSVDResult(
        U=transforms.inverse(QTensor._wrap(Uh), S),
        S=transforms.inverse(QTensor._wrap(Sh), S),
        V=transforms.inverse(QTensor._wrap(Vh), S),
        transform=S,
        singular_values=sv,
    )


def transformed_singular_values(Q: QTensor, S: TransformSet, workers: int | None = None) -> np.ndarray:
    """Per-slice QSVD singular values of the transformed tensor, shape ``(p, *trailing)``."""
    from .qlinalg import singular_values

    S.check(Q.shape)
    Qh = transforms.forward(Q, S)
    idxs = _slices(Q.shape)
    vals = pmap(lambda idx: singular_values(_slice(Qh, idx)), idxs, workers)
    out = np.zeros((min(Q.shape[:2]),) + Q.shape[2:])
    for idx, v in zip(idxs, vals):
        out[(slice(None),) + idx] = v
    return out


def qt_rank(Q: QTensor, S: TransformSet, tol: float = 1e-10) -> int:
    sv = transformed_singular_values(Q, S)
    if sv.size == 0:
        return 0
    top = sv.max()
    if top == 0:
        return 0
    tubes = sv.reshape(sv.shape[0], -1).max(axis=1)
    return int(np.count_nonzero(tubes > tol * top))


def qtnn(Q: QTensor, S: TransformSet) -> float:
    return float(transformed_singular_values(Q, S).sum())


def qt_phi_norm(Q: QTensor, S: TransformSet, phi) -> float:
    sv = transformed_singular_values(Q, S)
    return float(phi.value(sv, np.arange(sv.shape[0]).reshape((-1,) + (1,) * (sv.ndim - 1))).sum())
