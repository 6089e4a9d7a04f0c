"""Independent reference implementations used as test oracles.

These deliberately avoid the package's own kernels: quaternion products go
through 4x4 real matrices, matrix products through explicit loops, SVDs
through plain complex LAPACK on the adjoint.
"""
import numpy as np


def left_matrix(q):
    a, b, c, d = q
    return np.array(
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ]
    )


def qmul_ref(p, q):
    return left_matrix(p) @ np.asarray(q, dtype=float)


def qmatmul_loop(P, Q):
    """``(4, m, k) x (4, k, n)`` by triple loop over entries."""
    m, k = P.shape[1:]
    n = Q.shape[2]
    out = np.zeros((4, m, n))
    for i in range(m):
        for j in range(n):
            acc = np.zeros(4)
            for l in range(k):
                acc += qmul_ref(P[:, i, l], Q[:, l, j])
            out[:, i, j] = acc
    return out


def adjoint(D):
    qa = D[0] + 1j * D[1]
    qb = D[2] + 1j * D[3]
    return np.block([[qa, qb], [-qb.conj(), qa.conj()]])


def from_adjoint(C):
    m, n = C.shape[0] // 2, C.shape[1] // 2
    qa, qb = C[:m, :n], C[:m, n:]
    return np.stack([qa.real, qa.imag, qb.real, qb.imag])


def svt_adjoint(D, t):
    """Singular value soft-threshold of a quaternion matrix via its adjoint.

    Thresholding every (paired) adjoint singular value keeps the adjoint
    structure, so the top block row gives the quaternion result.
    """
    C = adjoint(D)
    U, s, Vh = np.linalg.svd(C, full_matrices=False)
    return from_adjoint((U * np.maximum(s - t, 0.0)) @ Vh)


def unfold_loop(T, k):
    """Mode-k unfolding by evaluating the column index formula entry by entry (1-based k)."""
    shape = T.shape[1:]
    N = len(shape)
    cols = int(np.prod(shape)) // shape[k - 1]
    out = np.zeros((4, shape[k - 1], cols))
    for idx in np.ndindex(*shape):
        j, J = 0, 1
        for l in range(N):
            if l == k - 1:
                continue
            j += idx[l] * J
            J *= shape[l]
        out[:, idx[k - 1], j] = T[(slice(None),) + idx]
    return out


def grid_prox(sigma, lam, value, n=20001, refine=3):
    """Grid search of ``0.5 (x - sigma)^2 + lam * value(x)`` over ``[0, sigma]`` with local refinement."""
    lo, hi = 0.0, float(sigma)
    best_x, best_f = 0.0, np.inf
    for _ in range(refine + 1):
        xs = np.linspace(lo, hi, n)
        f = 0.5 * (xs - sigma) ** 2 + lam * value(xs)
        i = int(np.argmin(f))
        if f[i] < best_f:
            best_f, best_x = float(f[i]), float(xs[i])
        step = (hi - lo) / (n - 1)
        lo, hi = max(0.0, xs[i] - step), min(float(sigma), xs[i] + step)
    return best_x, best_f


def ssim_bruteforce(a, b, L=255.0, size=11, sigma=1.5, k1=0.01, k2=0.03):
    r = np.arange(size) - (size - 1) / 2
    g = np.exp(-(r**2) / (2 * sigma**2))
    w = np.outer(g, g)
    w /= w.sum()
    c1, c2 = (k1 * L) ** 2, (k2 * L) ** 2
    H, W = a.shape
    vals = []
    for i in range(H - size + 1):
        for j in range(W - size + 1):
            pa = a[i : i + size, j : j + size]
            pb = b[i : i + size, j : j + size]
            ma, mb = (w * pa).sum(), (w * pb).sum()
            va = (w * (pa - ma) ** 2).sum()
            vb = (w * (pb - mb) ** 2).sum()
            cov = (w * (pa - ma) * (pb - mb)).sum()
            vals.append(((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma**2 + mb**2 + c1) * (va + vb + c2)))
    return float(np.mean(vals))


def fold_loop(M, k, shape):
    """Inverse of ``unfold_loop``."""
    N = len(shape)
    out = np.zeros((4,) + tuple(shape))
    for idx in np.ndindex(*shape):
        j, J = 0, 1
        for l in range(N):
            if l == k - 1:
                continue
            j += idx[l] * J
            J *= shape[l]
        out[(slice(None),) + idx] = M[:, idx[k - 1], j]
    return out


def nuclear_completion_admm(O, mask, alpha, beta0, rho, beta_max, iters):
    """Convex Tucker completion ADMM with soft-thresholded unfoldings.

    Mirrors the update order of the solver under test but uses loop-based
    unfolding and adjoint SVT. Returns the list of P iterates.
    """
    shape = O.shape[1:]
    N = len(shape)
    obs = np.where(mask, O, 0.0)
    P = obs.copy()
    Q = [unfold_loop(P, k) for k in range(1, N + 1)]
    F = [np.zeros_like(q) for q in Q]
    beta = beta0
    out = []
    for _ in range(iters):
        P = sum(beta * fold_loop(Q[k] - F[k] / beta, k + 1, shape) for k in range(N)) / (N * beta)
        P[:, mask] = obs[:, mask]
        for k in range(N):
            Pk = unfold_loop(P, k + 1)
            Q[k] = svt_adjoint(Pk + F[k] / beta, alpha[k] / beta)
            F[k] = F[k] + beta * (Pk - Q[k])
        beta = min(beta_max, rho * beta)
        out.append(P.copy())
    return out
