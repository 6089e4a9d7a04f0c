"""Non-convex rank surrogates and their proximal operators.

Each surrogate is a concave, non-decreasing function on ``[0, inf)``
applied to singular values. All proxes use the scaling

    argmin_x  0.5 * (x - sigma)**2 + lam * phi(x)

and are solved by DC iteration: the concave part is linearised at the
current iterate, giving ``x <- max(sigma - lam * phi'(x), 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transforms
from ._parallel import pmap
from .errors import DomainError
from .qlinalg import qmatmul, qsvd, conj_transpose
from .quaternion import QTensor
from .transforms import TransformSet

KINDS = ("geman", "laplace", "logarithm", "weighted_nuclear", "schatten_p", "weighted_schatten_p")

ALIASES = {
    "geman": "geman",
    "laplace": "laplace",
    "log": "logarithm",
    "logarithm": "logarithm",
    "wnn": "weighted_nuclear",
    "weighted_nuclear": "weighted_nuclear",
    "nuclear": "weighted_nuclear",
    "sp": "schatten_p",
    "schatten_p": "schatten_p",
    "wsp": "weighted_schatten_p",
    "weighted_schatten_p": "weighted_schatten_p",
}

# derivative of x**p at 0 is infinite; clamp it
DERIV_CAP = 1e12


@dataclass(frozen=True)
class Surrogate:
    kind: str = "geman"
    gamma: float = 1.0
    p: float = 0.5
    weights: tuple | None = None

    def __post_init__(self):
        kind = ALIASES.get(self.kind)
        if kind is None:
            raise DomainError(f"unknown surrogate {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if kind in ("schatten_p", "weighted_schatten_p") and not (0 < self.p < 1):
            raise DomainError("p must lie in (0, 1)")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if not w or min(w) < 0:
                raise DomainError("weights must be a non-empty nonnegative sequence")
            object.__setattr__(self, "weights", w)

    def _w(self, index):
        if self.weights is None or self.kind not in ("weighted_nuclear", "weighted_schatten_p"):
            return 1.0
        w = np.asarray(self.weights)
        # ranks past the supplied vector reuse its last entry
        return w[np.minimum(np.asarray(index), len(w) - 1)]

    def value(self, x, index=0):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < 0):
            raise DomainError("surrogates are defined on x >= 0")
        g = self.gamma
        k = self.kind
        if k == "geman":
            return (1 + g) * x / (x + g)
        if k == "laplace":
            return 1 - np.exp(-x / g)
        if k == "logarithm":
            return np.log(g + x)
        if k == "weighted_nuclear":
            return self._w(index) * x
        if k == "schatten_p":
            return x**self.p
        return self._w(index) * x**self.p

    def deriv(self, x, index=0):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < 0):
            raise DomainError("surrogates are defined on x >= 0")
        g = self.gamma
        k = self.kind
        if k == "geman":
            return (1 + g) * g / (x + g) ** 2
        if k == "laplace":
            return np.exp(-x / g) / g
        if k == "logarithm":
            return 1 / (g + x)
        if k == "weighted_nuclear":
            return self._w(index) * np.ones_like(x)
        with np.errstate(divide="ignore"):
            d = self.p * x ** (self.p - 1)
        d = np.minimum(d, DERIV_CAP)
        if k == "weighted_schatten_p":
            d = self._w(index) * d
        return d

    def deriv_at_zero(self, index=0) -> float:
        return float(np.max(self.deriv(np.zeros(np.shape(index)), index)))


def phi_value(s: Surrogate, x, i=0):
    return s.value(x, i)


def phi_deriv(s: Surrogate, x, i=0):
    return s.deriv(x, i)


def default_gamma(shape) -> float:
    """Three times the larger spatial extent."""
    return 3.0 * max(shape[:2])


@dataclass(frozen=True)
class ProxConfig:
    max_iter: int = 10
    tol: float = 1e-8

    def __post_init__(self):
        if self.max_iter < 1:
            raise DomainError("need at least one DC iteration")


def scalar_prox(sigma, lam: float, s: Surrogate, cfg: ProxConfig = ProxConfig(), index=None):
    """DC solution of ``argmin_x 0.5 (x - sigma)^2 + lam phi(x)``, elementwise.

    ``index`` gives the rank position of each entry (for weighted kinds);
    by default entries along the first axis are ranks 0, 1, 2, ...

    The DC sequence started at ``sigma`` decreases monotonically to the
    largest stationary point; the zero candidate is compared at the end since
    it can be the better of the two local minima.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if lam < 0:
        raise DomainError("threshold must be nonnegative")
    if np.any(sigma < 0):
        raise DomainError("singular values must be nonnegative")
    if index is None:
        index = np.arange(sigma.shape[0]).reshape((-1,) + (1,) * (sigma.ndim - 1)) if sigma.ndim else 0
    if lam == 0:
        return sigma.copy()
    x = sigma.copy()
    for _ in range(cfg.max_iter):
        xn = np.maximum(sigma - lam * s.deriv(x, index), 0.0)
        done = np.all(np.abs(xn - x) < cfg.tol)
        x = xn
        if done:
            break
    obj_x = 0.5 * (x - sigma) ** 2 + lam * s.value(x, index)
    obj_0 = 0.5 * sigma**2 + lam * s.value(np.zeros_like(x), index)
    return np.where(obj_0 < obj_x, 0.0, x)


def prox_objective(x, sigma, lam, s: Surrogate, index=0):
    return 0.5 * (np.asarray(x) - sigma) ** 2 + lam * s.value(x, index)


@dataclass(frozen=True)
class LowRankProx:
    """Output of a matrix prox with the factors it was built from."""

    X: QTensor
    U: QTensor
    V: QTensor
    sigma_in: np.ndarray
    sigma_out: np.ndarray


def lrqa_prox_full(Q: QTensor, lam: float, s: Surrogate, cfg: ProxConfig = ProxConfig()) -> LowRankProx:
    r = qsvd(Q, full_matrices=False)
    out = scalar_prox(r.S, lam, s, cfg)
    keep = out > 0
    if not np.any(keep):
        X = QTensor.zeros(Q.shape)
    else:
        Uk = QTensor._wrap(r.U.data[:, :, keep] * out[keep])
        Vk = QTensor._wrap(r.V.data[:, :, keep])
        X = qmatmul(Uk, conj_transpose(Vk))
    return LowRankProx(X=X, U=r.U, V=r.V, sigma_in=r.S, sigma_out=out)


def lrqa_prox(Q: QTensor, lam: float, s: Surrogate, cfg: ProxConfig = ProxConfig()) -> QTensor:
    """Singular-value prox of the phi-norm on a quaternion matrix."""
    return lrqa_prox_full(Q, lam, s, cfg).X


def qt_prox_full(Q: QTensor, lam: float, s: Surrogate, S: TransformSet,
                 cfg: ProxConfig = ProxConfig(), workers: int | None = None):
    """Tensor prox; returns ``(X, sigma_out)`` with per-slice output singular values."""
    from .qtproduct import _slice, _slices

    if Q.ndim < 3:
        raise DomainError(f"tensor prox needs order >= 3, got {Q.ndim}")
    S.check(Q.shape)
    Qh = transforms.forward(Q, S)
    idxs = _slices(Q.shape)
    res = pmap(lambda idx: lrqa_prox_full(_slice(Qh, idx), lam, s, cfg), idxs, workers)
    Xh = np.empty_like(Qh.data)
    sv = np.zeros((min(Q.shape[:2]),) + Q.shape[2:])
    for idx, r in zip(idxs, res):
        Xh[(slice(None), slice(None), slice(None)) + idx] = r.X.data
        sv[(slice(None),) + idx] = r.sigma_out
    return transforms.inverse(QTensor._wrap(Xh), S), sv


def qt_prox(Q: QTensor, lam: float, s: Surrogate, S: TransformSet,
            cfg: ProxConfig = ProxConfig(), workers: int | None = None) -> QTensor:
    return qt_prox_full(Q, lam, s, S, cfg, workers)[0]


def shrink(Q: QTensor, t: float) -> QTensor:
    """Quaternion soft threshold: keep each entry's direction, cut its modulus by ``t``."""
    if t < 0:
        raise DomainError("shrink threshold must be nonnegative")
    mod = Q.modulus()
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(mod > t, (mod - t) / mod, 0.0)
    return QTensor._wrap(Q.data * factor)
