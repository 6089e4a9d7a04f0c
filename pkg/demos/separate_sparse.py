# %% [markdown]
# Splitting a corrupted tensor into a low-rank part and sparse gross errors,
# with the low-rank part measured after a DCT along the frame axis.

# %%
import numpy as np

from qtlr import AdmmSchedule, RpcaProblem, Surrogate, TransformSet, auto_lambda, fro_norm, psnr, trpca_nc
from qtlr.synthetic import low_qt_rank_tensor, sparse_corruption

shape = (30, 30, 10)
T = TransformSet.for_tensor("dct", shape)
L = low_qt_rank_tensor(shape, 3, T, seed=0, scale=4.0)
E, support = sparse_corruption(shape, 0.05, 40.0, seed=100)
X = L + E
print("corrupted entries", support.sum(), "of", support.size)

# %%
lam = auto_lambda(shape)
for s in (Surrogate("geman", gamma=90.0), Surrogate("wnn")):
    Q, S, rep = trpca_nc(RpcaProblem(X, lam, s, T), AdmmSchedule())
    found = S.modulus() > 0
    print(f"{s.kind:17s} PSNR {psnr(L, Q):7.2f} dB  recall {(found & support).sum() / support.sum():.2f}  "
          f"feasibility {rep.kkt[0] / fro_norm(X):.1e}  iterations {rep.iterations}")
