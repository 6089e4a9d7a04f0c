"""Unfoldings, mode-n products and ket augmentation.

Modes are 1-based throughout, matching the usual tensor notation. The
mode-k unfolding sends entry ``(i_1, ..., i_N)`` to row ``i_k`` and column
``1 + sum_{l != k} (i_l - 1) J_l`` with ``J_l`` the product of the extents
``I_m`` for ``m < l, m != k``; that is a first-index-fastest reshape of the
remaining modes.
"""
from __future__ import annotations

import numpy as np

from .errors import ModeOutOfRange, NotPowerOfTwo, ShapeMismatch
from .qlinalg import qmatmul
from .quaternion import QTensor


def _check_mode(k: int, lo: int, hi: int):
    if not (lo <= k <= hi):
        raise ModeOutOfRange(f"mode {k} outside {lo}..{hi}")


def unfold(T: QTensor, k: int) -> QTensor:
    _check_mode(k, 1, T.ndim)
    d = np.moveaxis(T.data, k, 1)
    return QTensor._wrap(d.reshape((4, T.shape[k - 1], -1), order="F"))


def fold(M: QTensor, k: int, shape) -> QTensor:
    shape = tuple(int(s) for s in shape)
    _check_mode(k, 1, len(shape))
    rest = shape[: k - 1] + shape[k:]
    if M.shape != (shape[k - 1], int(np.prod(rest, dtype=np.int64))):
        raise ShapeMismatch(f"matrix {M.shape} does not fold to {shape} along mode {k}")
    d = M.data.reshape((4, shape[k - 1]) + rest, order="F")
    return QTensor._wrap(np.moveaxis(d, 1, k))


def unfold_index(idx, shape, k: int):
    """Matrix position (row, col) of a 1-based tensor index under :func:`unfold`."""
    _check_mode(k, 1, len(shape))
    col, stride = 1, 1
    for l, (i, n) in enumerate(zip(idx, shape), start=1):
        if l == k:
            continue
        col += (i - 1) * stride
        stride *= n
    return idx[k - 1], col


def mode_n_product(T: QTensor, M, n: int) -> QTensor:
    """``T x_n M``: left-multiply every mode-n fibre by ``M``.

    ``M`` may be a real ndarray or a quaternion matrix.
    """
    _check_mode(n, 1, T.ndim)
    if isinstance(M, QTensor):
        if M.ndim != 2 or M.shape[1] != T.shape[n - 1]:
            raise ShapeMismatch(f"matrix {M.shape} cannot act on mode {n} of {T.shape}")
        shape = list(T.shape)
        shape[n - 1] = M.shape[0]
        return fold(qmatmul(M, unfold(T, n)), n, shape)
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[1] != T.shape[n - 1]:
        raise ShapeMismatch(f"matrix {M.shape} cannot act on mode {n} of {T.shape}")
    # real matrices commute with quaternion units, so act on each component
    out = np.tensordot(M, T.data, axes=(1, n))
    return QTensor._wrap(np.moveaxis(out, 0, n))


def tt_unfold(T: QTensor, k: int) -> QTensor:
    """Group modes ``1..k`` as rows and ``k+1..N`` as columns."""
    _check_mode(k, 1, T.ndim - 1)
    rows = int(np.prod(T.shape[:k], dtype=np.int64))
    return QTensor._wrap(T.data.reshape((4, rows, -1), order="F"))


def tt_fold(M: QTensor, k: int, shape) -> QTensor:
    shape = tuple(int(s) for s in shape)
    _check_mode(k, 1, len(shape) - 1)
    rows = int(np.prod(shape[:k], dtype=np.int64))
    cols = int(np.prod(shape[k:], dtype=np.int64))
    if M.shape != (rows, cols):
        raise ShapeMismatch(f"matrix {M.shape} does not fold to {shape} at split {k}")
    return QTensor._wrap(M.data.reshape((4,) + shape, order="F"))


def _ket_levels(T: QTensor) -> int:
    if T.ndim < 2 or T.shape[0] != T.shape[1]:
        raise NotPowerOfTwo(f"ket augmentation needs square leading dims, got {T.shape}")
    side = T.shape[0]
    n = side.bit_length() - 1
    if side < 2 or (1 << n) != side:
        raise NotPowerOfTwo(f"side {side} is not a power of two >= 2")
    return n


def ket_augment(T: QTensor) -> QTensor:
    """Re-address a ``2^n x 2^n x ...`` tensor as ``4 x ... x 4 x ...`` (n fours).

    New mode ``l`` holds the ``l``-th least significant bit pair of
    ``(row, col)`` as the digit ``row_bit + 2 * col_bit``, so within each
    2x2 block the order is (1,1), (2,1), (1,2), (2,2).
    """
    n = _ket_levels(T)
    rest = T.shape[2:]
    d = T.data.reshape((4,) + (2,) * (2 * n) + rest, order="F")
    # axes 1..n are row bits (LSB first), n+1..2n column bits
    perm = [0]
    for l in range(n):
        perm += [1 + l, 1 + n + l]
    perm += list(range(1 + 2 * n, d.ndim))
    d = d.transpose(perm)
    return QTensor._wrap(np.ascontiguousarray(d).reshape((4,) + (4,) * n + rest, order="F"))


def ket_inverse(K: QTensor, levels: int | None = None) -> QTensor:
    if levels is None:
        levels = 0
        while levels < K.ndim and K.shape[levels] == 4:
            levels += 1
        # a trailing mode of extent 4 is ambiguous; callers pass levels then
    n = levels
    if n < 1 or K.shape[:n] != (4,) * n:
        raise ShapeMismatch(f"{K.shape} does not start with {n} modes of extent 4")
    rest = K.shape[n:]
    d = K.data.reshape((4,) + (2,) * (2 * n) + rest, order="F")
    perm = [0] + [1 + 2 * l for l in range(n)] + [2 + 2 * l for l in range(n)]
    perm += list(range(1 + 2 * n, d.ndim))
    d = d.transpose(perm)
    side = 1 << n
    return QTensor._wrap(np.ascontiguousarray(d).reshape((4, side, side) + rest, order="F"))
