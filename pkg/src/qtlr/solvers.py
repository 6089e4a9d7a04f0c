"""ADMM solvers for quaternion tensor completion and robust PCA.

* :func:`lrqtc_nctr`  -- completion with a non-convex surrogate of the
  Tucker rank (one auxiliary matrix per mode-k unfolding).
* :func:`lrqtc_ncttr` -- the same skeleton over the TT unfoldings.
* :func:`trpca_nc`    -- low-rank + sparse split with a surrogate of the
  QT-rank and a quaternion L1 penalty.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import transforms
from ._parallel import pmap
from .errors import InvalidProblem, NumericalFailure
from .metrics import psnr
from .qlinalg import conj_transpose, qmatmul, qsvd, singular_values
from .quaternion import QTensor, fro_norm
from .surrogates import (
    ProxConfig,
    Surrogate,
    default_gamma,
    lrqa_prox_full,
    qt_prox_full,
    shrink,
)
from .tensor_ops import fold, tt_fold, tt_unfold, unfold
from .transforms import TransformSet


@dataclass(frozen=True)
class AdmmSchedule:
    beta0: float = 1e-2
    rho: float = 1.1
    beta_max: float = 1e4
    tol: float = 1e-6
    max_iter: int | None = None  # None: 25 for completion, 100 for RPCA

    def __post_init__(self):
        if not (self.beta0 > 0):
            raise InvalidProblem("beta0 must be positive")
        if not (self.rho > 1):
            raise InvalidProblem("rho must exceed 1")
        if self.beta0 > self.beta_max:
            raise InvalidProblem("beta0 must not exceed beta_max")
        if self.max_iter is not None and self.max_iter < 1:
            raise InvalidProblem("max_iter must be >= 1")

    def iterations(self, default: int) -> int:
        return default if self.max_iter is None else self.max_iter

    def next_beta(self, beta: float) -> float:
        return min(self.beta_max, self.rho * beta)


@dataclass(frozen=True)
class CompletionProblem:
    observed: QTensor
    mask: np.ndarray
    surrogate: Surrogate | None = None
    alpha: tuple | None = None
    rank: str = "tucker"
    prox: ProxConfig = ProxConfig()

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.observed.shape:
            raise InvalidProblem(f"mask shape {mask.shape} differs from tensor shape {self.observed.shape}")
        if not mask.any():
            raise InvalidProblem("at least one entry must be observed")
        if self.rank not in ("tucker", "tt"):
            raise InvalidProblem(f"rank flavour must be 'tucker' or 'tt', got {self.rank!r}")
        object.__setattr__(self, "mask", mask)
        n = self.n_blocks
        if n < 1:
            raise InvalidProblem("TT completion needs an order >= 2 tensor")
        alpha = self.alpha
        if alpha is None:
            alpha = (1.0 / n,) * n
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) != n:
            raise InvalidProblem(f"need {n} weights, got {len(alpha)}")
        if min(alpha) < 0 or abs(sum(alpha) - 1.0) > 1e-12:
            raise InvalidProblem("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "alpha", alpha)
        if self.surrogate is None:
            object.__setattr__(self, "surrogate", Surrogate("geman", gamma=default_gamma(self.observed.shape)))

    @property
    def n_blocks(self) -> int:
        N = self.observed.ndim
        return N if self.rank == "tucker" else N - 1


@dataclass(frozen=True)
class RpcaProblem:
    data: QTensor
    lam: float
    surrogate: Surrogate | None = None
    transform: TransformSet | None = None
    prox: ProxConfig = ProxConfig()

    def __post_init__(self):
        if not (self.lam > 0):
            raise InvalidProblem("lambda must be positive")
        if self.data.ndim < 3:
            raise InvalidProblem("RPCA works on tensors of order >= 3")
        if self.transform is None:
            object.__setattr__(self, "transform", TransformSet.for_tensor("identity", self.data.shape))
        self.transform.check(self.data.shape)
        if self.surrogate is None:
            object.__setattr__(self, "surrogate", Surrogate("geman", gamma=default_gamma(self.data.shape)))


def auto_lambda(shape) -> float:
    """``1 / sqrt(max(H, W) * T)`` with ``T`` the product of trailing extents."""
    T = int(np.prod(shape[2:], dtype=np.int64)) if len(shape) > 2 else 1
    return 1.0 / math.sqrt(max(shape[:2]) * T)


@dataclass
class CompletionState:
    P: QTensor
    Q: list
    F: list
    beta: list
    problem: CompletionProblem


@dataclass
class RpcaState:
    Q: QTensor
    S: QTensor
    Y: QTensor
    beta: float
    problem: RpcaProblem


@dataclass
class SolverReport:
    lagrangian: list = field(default_factory=list)
    primal_residual: list = field(default_factory=list)
    multiplier_change: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    change: list = field(default_factory=list)  # squared successive change used for stopping
    proj_residual: list = field(default_factory=list)
    psnr: list = field(default_factory=list)
    iterations: int = 0
    stop_reason: str = ""
    kkt: tuple = ()
    state: object = None

    def rows(self):
        """One dict per iteration, for CSV export."""
        out = []
        for i in range(self.iterations):
            row = {
                "iteration": i + 1,
                "lagrangian": self.lagrangian[i],
                "primal_residual": self.primal_residual[i],
                "multiplier_change": self.multiplier_change[i],
                "beta": self.beta[i],
                "change": self.change[i],
            }
            if self.proj_residual:
                row["proj_residual"] = self.proj_residual[i]
            if self.psnr:
                row["psnr_db"] = self.psnr[i]
            out.append(row)
        return out

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "kkt_residuals": dict(zip(("r_feas", "r_proj", "r_grad"), (float(v) for v in self.kkt))),
        }


def _fro2(d: np.ndarray) -> float:
    return float(np.sum(d * d))


def _phi_norm(s: Surrogate, sv: np.ndarray) -> float:
    idx = np.arange(sv.shape[0]).reshape((-1,) + (1,) * (sv.ndim - 1))
    return float(np.sum(s.value(sv, idx)))


def _subgradient_distance(F: QTensor, U: QTensor, sv: np.ndarray, V: QTensor, scale: float, s: Surrogate) -> float:
    """Distance from ``F`` to ``scale * d||X||_phi`` at ``X = U diag(sv) V^H``.

    On the range of ``X`` the subgradient is ``U diag(scale phi'(sv)) V^H``.
    The block orthogonal to both singular subspaces may be any matrix with
    spectral norm at most ``scale * phi'(0)``.
    """
    live = sv > 0
    Ur = QTensor._wrap(U.data[:, :, live])
    Vr = QTensor._wrap(V.data[:, :, live])
    idx = np.flatnonzero(live)
    if idx.size:
        core = qmatmul(qmatmul(conj_transpose(Ur), F), Vr).data.copy()
        core[0][np.diag_indices(idx.size)] -= scale * s.deriv(sv[live], idx)
        d2 = _fro2(core)
        UrF = qmatmul(conj_transpose(Ur), F)
        FVr = qmatmul(F, Vr)
        Pu_F = qmatmul(Ur, UrF)
        F_Pv = qmatmul(FVr, conj_transpose(Vr))
        Pu_F_Pv = qmatmul(Ur, qmatmul(UrF, qmatmul(Vr, conj_transpose(Vr))))
        # ||Pu F (I-Pv)||^2 + ||(I-Pu) F Pv||^2
        d2 += _fro2(Pu_F.data - Pu_F_Pv.data) + _fro2(F_Pv.data - Pu_F_Pv.data)
        N = F.data - Pu_F.data - F_Pv.data + Pu_F_Pv.data
    else:
        d2 = 0.0
        N = F.data
    bound = scale * s.deriv_at_zero(np.arange(sv.size))
    if np.isfinite(bound) and bound < 1e11:
        nsv = singular_values(QTensor._wrap(N))
        d2 += float(np.sum(np.maximum(nsv - bound, 0.0) ** 2))
    return math.sqrt(max(d2, 0.0))


def kkt_residuals(state) -> tuple:
    """``(r_feas, r_proj, r_grad)`` for a completion or RPCA state.

    Completion: ``max_k ||P_[k] - Q_k||``, ``||P_Omega - O_Omega||`` and the
    largest distance of ``F_k`` to ``alpha_k d||Q_k||_phi``.

    RPCA: ``||X - Q - S||``, the distance of ``Y`` to ``lam d||S||_1`` and
    the distance of ``Y`` to ``d||Q||_phi`` measured slice-wise in the
    transformed domain (exact for orthonormal transforms).
    """
    if isinstance(state, CompletionState):
        return _kkt_completion(state)
    if isinstance(state, RpcaState):
        return _kkt_rpca(state)
    raise TypeError(f"unsupported state {type(state).__name__}")


def _blocks(problem: CompletionProblem):
    if problem.rank == "tucker":
        modes = range(1, problem.observed.ndim + 1)
        return list(modes), unfold, fold
    return list(range(1, problem.observed.ndim)), tt_unfold, tt_fold


def _kkt_completion(st: CompletionState) -> tuple:
    prob = st.problem
    modes, unf, _ = _blocks(prob)
    r_feas = max(fro_norm(unf(st.P, k) - st.Q[i]) for i, k in enumerate(modes))
    r_proj = math.sqrt(_fro2((st.P.data - prob.observed.data)[:, prob.mask]))
    r_grad = 0.0
    for i, Qk in enumerate(st.Q):
        r = qsvd(Qk, full_matrices=False)
        sv = np.where(r.S > 1e-12 * max(r.S[0], 1e-300), r.S, 0.0) if r.S.size else r.S
        r_grad = max(r_grad, _subgradient_distance(st.F[i], r.U, sv, r.V, prob.alpha[i], prob.surrogate))
    return r_feas, r_proj, r_grad


def _kkt_rpca(st: RpcaState) -> tuple:
    from .qtproduct import _slice, _slices

    prob = st.problem
    X = prob.data
    r_feas = fro_norm(X - st.Q - st.S)
    lam = prob.lam
    mS = st.S.modulus()
    on = mS > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        sign = np.where(on, st.S.data / np.where(on, mS, 1.0), 0.0)
    gap_on = st.Y.data - lam * sign
    d2 = _fro2(gap_on[:, on])
    d2 += float(np.sum(np.maximum(st.Y.modulus()[~on] - lam, 0.0) ** 2))
    r_proj = math.sqrt(d2)
    T = prob.transform
    Qh = transforms.forward(st.Q, T)
    Yh = transforms.forward(st.Y, T)
    r_grad2 = 0.0
    for idx in _slices(X.shape):
        r = qsvd(_slice(Qh, idx), full_matrices=False)
        sv = np.where(r.S > 1e-12 * max(r.S[0], 1e-300), r.S, 0.0) if r.S.size else r.S
        r_grad2 += _subgradient_distance(_slice(Yh, idx), r.U, sv, r.V, 1.0, prob.surrogate) ** 2
    return r_feas, r_proj, math.sqrt(r_grad2)


def lrqtc(prob: CompletionProblem, sched: AdmmSchedule = AdmmSchedule(), truth: QTensor | None = None,
          workers: int | None = None, callback: Callable | None = None,
          paper_literal_p_update: bool = False):
    """Completion ADMM over Tucker or TT unfoldings (chosen by ``prob.rank``).

    Returns ``(P, report)``; ``P`` agrees with the observation on the mask.
    ``callback(iteration, state)`` is invoked after every iteration.
    """
    O = prob.observed
    mask = prob.mask
    shape = O.shape
    modes, unf, fld = _blocks(prob)
    K = len(modes)
    s = prob.surrogate
    alpha = prob.alpha
    n_iter = sched.iterations(25)

    obs = np.where(mask, O.data, 0.0)
    P = QTensor._wrap(obs.copy())
    Q = [unf(P, k) for k in modes]
    F = [QTensor.zeros(q.shape) for q in Q]
    beta = [sched.beta0] * K
    rep = SolverReport()
    live = False  # whether the current blocks came out of a nonzero prox

    for it in range(n_iter):
        # P-update: beta-weighted average of the folded blocks, then re-impose data
        acc = np.zeros_like(obs)
        for i, k in enumerate(modes):
            blk = fld(Q[i] - F[i] / beta[i], k, shape).data
            acc += blk if paper_literal_p_update else beta[i] * blk
        P_new = acc / sum(beta)
        P_new[:, mask] = obs[:, mask]
        P_prev = P
        P = QTensor._wrap(P_new)

        def solve(i):
            k = modes[i]
            try:
                return lrqa_prox_full(unf(P, k) + F[i] / beta[i], alpha[i] / beta[i], s, prob.prox)
            except NumericalFailure as exc:
                raise NumericalFailure("inner QSVD failed", iteration=it + 1, mode=k) from exc

        fed = live
        res = pmap(solve, range(K), workers)
        Q = [r.X for r in res]
        live = any(r.sigma_out.any() for r in res)

        lag = 0.0
        resid = 0.0
        dF = 0.0
        F_new = []
        for i, k in enumerate(modes):
            D = unf(P, k).data - Q[i].data
            lag += alpha[i] * _phi_norm(s, res[i].sigma_out) + float(np.vdot(F[i].data, D)) + 0.5 * beta[i] * _fro2(D)
            resid = max(resid, math.sqrt(_fro2(D)))
            # F <- F - beta (Q - P_[k])
            step = beta[i] * D
            dF = max(dF, math.sqrt(_fro2(step)))
            F_new.append(QTensor._wrap(F[i].data + step))
        F = F_new

        change = _fro2(P.data - P_prev.data)
        rep.lagrangian.append(lag)
        rep.primal_residual.append(resid)
        rep.multiplier_change.append(dF)
        rep.beta.append(beta[0])
        rep.change.append(change)
        rep.proj_residual.append(math.sqrt(_fro2((P.data - O.data)[:, mask])))
        if truth is not None:
            rep.psnr.append(psnr(truth, P))
        beta = [sched.next_beta(b) for b in beta]
        rep.iterations = it + 1
        if callback is not None:
            callback(it + 1, CompletionState(P, list(Q), list(F), list(beta), prob))
        # a P-update fed by the initial guess or by all-zero blocks cannot move
        # P, so a zero change there is a stall rather than convergence
        if fed and change < sched.tol:
            rep.stop_reason = "tolerance"
            break
    else:
        rep.stop_reason = "max_iter"

    state = CompletionState(P, Q, F, beta, prob)
    rep.state = state
    rep.kkt = kkt_residuals(state)
    return P, rep


def lrqtc_nctr(prob: CompletionProblem, sched: AdmmSchedule = AdmmSchedule(), **kw):
    """Completion via a non-convex surrogate of the Tucker rank."""
    if prob.rank != "tucker":
        raise InvalidProblem("lrqtc_nctr needs rank='tucker'")
    return lrqtc(prob, sched, **kw)


def lrqtc_ncttr(prob: CompletionProblem, sched: AdmmSchedule = AdmmSchedule(), **kw):
    """Completion via a non-convex surrogate of the TT rank."""
    if prob.rank != "tt":
        raise InvalidProblem("lrqtc_ncttr needs rank='tt'")
    return lrqtc(prob, sched, **kw)


def trpca_nc(prob: RpcaProblem, sched: AdmmSchedule = AdmmSchedule(), truth: QTensor | None = None,
             workers: int | None = None, callback: Callable | None = None):
    """Robust PCA split ``X = Q + S`` with a surrogate QT-rank penalty on ``Q``.

    Returns ``(Q, S, report)``.
    """
    X = prob.data
    s = prob.surrogate
    T = prob.transform
    lam = prob.lam
    n_iter = sched.iterations(100)

    Q = QTensor.zeros(X.shape)
    S = QTensor.zeros(X.shape)
    Y = QTensor.zeros(X.shape)
    beta = sched.beta0
    rep = SolverReport()

    for it in range(n_iter):
        try:
            Q_new, sv = qt_prox_full(X - S + Y / beta, 1.0 / beta, s, T, prob.prox, workers)
        except NumericalFailure as exc:
            raise NumericalFailure("inner QSVD failed", iteration=it + 1) from exc
        S_new = shrink(X - Q_new + Y / beta, lam / beta)
        R = X.data - Q_new.data - S_new.data
        lag = (_phi_norm(s, sv) + lam * float(np.sum(S_new.modulus()))
               + float(np.vdot(Y.data, R)) + 0.5 * beta * _fro2(R))
        Y = QTensor._wrap(Y.data + beta * R)

        dQ = _fro2(Q_new.data - Q.data)
        dS = _fro2(S_new.data - S.data)
        Q, S = Q_new, S_new
        rep.lagrangian.append(lag)
        rep.primal_residual.append(math.sqrt(_fro2(R)))
        rep.multiplier_change.append(beta * math.sqrt(_fro2(R)))
        rep.beta.append(beta)
        rep.change.append(max(dQ, dS))
        if truth is not None:
            rep.psnr.append(psnr(truth, Q))
        beta = sched.next_beta(beta)
        rep.iterations = it + 1
        if callback is not None:
            callback(it + 1, RpcaState(Q, S, Y, beta, prob))
        # Q = S = 0 is a stall under a large initial threshold, not convergence
        if dQ < sched.tol and dS < sched.tol and (sv.any() or S.data.any()):
            rep.stop_reason = "tolerance"
            break
    else:
        rep.stop_reason = "max_iter"

    state = RpcaState(Q, S, Y, beta, prob)
    rep.state = state
    rep.kkt = kkt_residuals(state)
    return Q, S, rep


@dataclass(frozen=True)
class BetaCheck:
    converges: bool
    partial_sum: float
    bound: float

    def __bool__(self) -> bool:
        return self.converges


def beta_schedule_check(sched: AdmmSchedule, terms: int = 200) -> BetaCheck:
    """Partial sums of ``(b_t + b_{t-1}) / (2 b_{t-1}^2)`` under ``b_t = beta0 rho^t``.

    The ``beta_max`` cap is ignored. The limit is
    ``(rho^2 + rho) / (2 beta0 (rho - 1))``.
    """
    b = sched.beta0 * sched.rho ** np.arange(terms + 1)
    terms_ = (b[1:] + b[:-1]) / (2 * b[:-1] ** 2)
    partial = float(math.fsum(terms_))
    bound = (sched.rho**2 + sched.rho) / (2 * sched.beta0 * (sched.rho - 1))
    return BetaCheck(converges=sched.rho > 1 and partial <= bound, partial_sum=partial, bound=bound)
