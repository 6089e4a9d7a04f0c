"""Quaternion matrix linear algebra through the complex adjoint.

A quaternion matrix ``Q = Q_a + Q_b j`` maps to the complex matrix::

    chi(Q) = [[ Q_a,        Q_b      ],
              [-conj(Q_b),  conj(Q_a)]]

which is an algebra homomorphism. Singular values of ``chi(Q)`` come in
equal pairs; the QSVD keeps one of each pair and rebuilds quaternion
singular vectors from the complex ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ShapeMismatch
from .quaternion import QTensor

# candidate vectors whose residual after projection falls below this are
# treated as already spanned
_ACCEPT = 0.1


@dataclass(frozen=True)
class QSVDResult:
    U: QTensor
    S: np.ndarray
    V: QTensor

    def reconstruct(self) -> QTensor:
        k = self.S.shape[0]
        Uk = QTensor._wrap(self.U.data[:, :, :k] * self.S)
        return qmatmul(Uk, conj_transpose(QTensor._wrap(self.V.data[:, :, :k])))

    def rank(self, rtol: float = 1e-10) -> int:
        if self.S.size == 0 or self.S[0] == 0:
            return 0
        return int(np.count_nonzero(self.S > rtol * self.S[0]))


def _require_matrix(Q: QTensor):
    if Q.ndim != 2:
        raise ShapeMismatch(f"expected a quaternion matrix, got order {Q.ndim}")


def complex_adjoint(Q: QTensor) -> np.ndarray:
    _require_matrix(Q)
    qa, qb = Q.cayley_dickson()
    return np.block([[qa, qb], [-qb.conj(), qa.conj()]])


def from_complex_adjoint(C: np.ndarray) -> QTensor:
    """Recover ``Q`` from its adjoint using the top block row."""
    m2, n2 = C.shape
    if m2 % 2 or n2 % 2:
        raise ShapeMismatch(f"adjoint dimensions must be even, got {C.shape}")
    m, n = m2 // 2, n2 // 2
    return QTensor.from_cayley_dickson(C[:m, :n], C[:m, n:])


def conj_transpose(Q: QTensor) -> QTensor:
    _require_matrix(Q)
    return QTensor._wrap(np.swapaxes(Q.conj().data, 1, 2))


def qmatmul(P: QTensor, Q: QTensor) -> QTensor:
    """Quaternion matrix product, batched over any leading trailing-slice axes.

    Both operands are ``(rows, cols, *batch)``; the product is taken over the
    first two axes for every batch index.
    """
    if P.ndim < 2 or Q.ndim < 2:
        raise ShapeMismatch("qmatmul needs matrices")
    if P.shape[1] != Q.shape[0] or P.shape[2:] != Q.shape[2:]:
        raise ShapeMismatch(f"cannot multiply {P.shape} by {Q.shape}")
    pa, pb = (np.moveaxis(c, (0, 1), (-2, -1)) for c in P.cayley_dickson())
    qa, qb = (np.moveaxis(c, (0, 1), (-2, -1)) for c in Q.cayley_dickson())
    ra = pa @ qa - pb @ qb.conj()
    rb = pa @ qb + pb @ qa.conj()
    ra = np.moveaxis(ra, (-2, -1), (0, 1))
    rb = np.moveaxis(rb, (-2, -1), (0, 1))
    return QTensor.from_cayley_dickson(ra, rb)


def qeye(n: int) -> QTensor:
    return QTensor.real(np.eye(n))


def _jmap(c: np.ndarray) -> np.ndarray:
    # first adjoint column of u -> second adjoint column of u
    m = c.shape[0] // 2
    return np.concatenate([-c[m:].conj(), c[:m].conj()])


def _column_to_quaternion(C: np.ndarray) -> QTensor:
    m = C.shape[0] // 2
    return QTensor.from_cayley_dickson(C[:m], -C[m:].conj())


class _JBasis:
    """Orthonormal set closed under the structure map ``_jmap``."""

    def __init__(self, dim: int, capacity: int):
        self.B = np.zeros((dim, 2 * capacity), dtype=complex)
        self.k = 0

    def residual(self, v: np.ndarray) -> np.ndarray:
        B = self.B[:, : 2 * self.k]
        for _ in range(2):
            v = v - B @ (B.conj().T @ v)
        return v

    def try_add(self, v: np.ndarray) -> np.ndarray | None:
        r = self.residual(v)
        nr = np.linalg.norm(r)
        if nr <= _ACCEPT * max(np.linalg.norm(v), 1e-300):
            return None
        r = self.residual(r / nr)
        r /= np.linalg.norm(r)
        self.push(r)
        return r

    def push(self, r: np.ndarray):
        self.B[:, 2 * self.k] = r
        self.B[:, 2 * self.k + 1] = _jmap(r)
        self.k += 1


def _complete(basis: _JBasis, candidates: np.ndarray, count: int, seed: int = 0) -> list:
    """Add up to ``count`` structured vectors, from ``candidates`` then random fill."""
    out = []
    for j in range(candidates.shape[1]):
        if len(out) == count:
            return out
        r = basis.try_add(candidates[:, j])
        if r is not None:
            out.append(r)
    rng = np.random.default_rng(seed)
    dim = basis.B.shape[0]
    while len(out) < count:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        r = basis.try_add(v)
        if r is not None:
            out.append(r)
    return out


def qsvd(Q: QTensor, full_matrices: bool = True) -> QSVDResult:
    """Quaternion SVD ``Q = U diag(S) V^H``.

    With ``full_matrices=False`` only the leading ``min(m, n)`` singular
    vectors are returned.
    """
    _require_matrix(Q)
    m, n = Q.shape
    if m > n:
        r = qsvd(conj_transpose(Q), full_matrices)
        return QSVDResult(U=r.V, S=r.S, V=r.U)
    p = m
    if p == 0:
        return QSVDResult(U=QTensor.zeros((0, 0)), S=np.zeros(0), V=qeye(n) if full_matrices else QTensor.zeros((n, 0)))
    M = complex_adjoint(Q)
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("non-finite entries in QSVD input")
    try:
        Uc, sc, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"complex SVD did not converge: {exc}") from None
    Vc = Vh.conj().T

    # left side: Uc spans all of C^{2m}, so it always yields m structured vectors
    ub = _JBasis(2 * m, m)
    cu = np.column_stack(_complete(ub, Uc, m))
    sig_r = np.linalg.norm(M.conj().T @ cu, axis=0)
    order = np.argsort(-sig_r, kind="stable")
    cu = cu[:, order]
    sig_r = sig_r[order]
    S = np.abs(sc[0::2][:p])

    # right side: polar map for the range, structured completion for the rest
    null_tol = max(M.shape) * np.finfo(float).eps * (sc[0] if sc.size else 0.0)
    live = sig_r > null_tol
    cv_live = Vc @ (Uc.conj().T @ cu[:, live])
    ncols = n if full_matrices else p
    vb = _JBasis(2 * n, ncols)
    cv = np.zeros((2 * n, p), dtype=complex)
    dead = []
    for j in range(p):
        if live[j]:
            v = cv_live[:, np.count_nonzero(live[:j])]
            v = v / np.linalg.norm(v)
            cv[:, j] = v
            vb.push(v)
        else:
            dead.append(j)
    if dead:
        fill = _complete(vb, Vc, len(dead), seed=1)
        for j, v in zip(dead, fill):
            cv[:, j] = v
    extra = []
    if full_matrices and n > p:
        extra = _complete(vb, Vc, n - p, seed=2)
    if extra:
        cv = np.column_stack([cv] + extra)

    U = _column_to_quaternion(cu)
    V = _column_to_quaternion(cv)
    return QSVDResult(U=U, S=S, V=V)


def singular_values(Q: QTensor) -> np.ndarray:
    """QSVD singular values only (no vectors)."""
    _require_matrix(Q)
    if min(Q.shape) == 0:
        return np.zeros(0)
    try:
        sc = np.linalg.svd(complex_adjoint(Q), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"complex SVD did not converge: {exc}") from None
    return sc[0::2][: min(Q.shape)].copy()


def nuclear_norm(Q: QTensor) -> float:
    return float(np.sum(singular_values(Q)))


def is_unitary(Q: QTensor, tol: float = 1e-10) -> bool:
    _require_matrix(Q)
    m, n = Q.shape
    if m != n:
        raise ShapeMismatch(f"unitarity needs a square matrix, got {Q.shape}")
    return unitarity_error(Q) <= tol


def unitarity_error(Q: QTensor) -> float:
    """Largest of ``||Q^H Q - I||_F`` and ``||Q Q^H - I||_F``."""
    m, n = Q.shape
    QH = conj_transpose(Q)
    g1 = qmatmul(QH, Q).data.copy()
    g1[0] -= np.eye(n)
    g2 = qmatmul(Q, QH).data.copy()
    g2[0] -= np.eye(m)
    err1 = np.sqrt(np.sum(g1**2))
    err2 = np.sqrt(np.sum(g2**2)) if m == n else 0.0
    return float(max(err1, err2))
