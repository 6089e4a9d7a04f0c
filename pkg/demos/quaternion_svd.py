# %% [markdown]
# Quaternion matrices and their SVD. A colour pixel (r, g, b) becomes the
# pure quaternion r i + g j + b k, so an RGB image is one quaternion matrix.

# %%
import numpy as np

from qtlr import QTensor, qmatmul, qsvd, conj_transpose, unitarity_error

rng = np.random.default_rng(0)
A = QTensor(rng.standard_normal((4, 6, 5)))
print("shape", A.shape)

# %% [markdown]
# Multiplication is not commutative: i j = k but j i = -k.

# %%
I = QTensor.from_parts(x=np.eye(2))
J = QTensor.from_parts(y=np.eye(2))
print("ij k-part", qmatmul(I, J).z[0, 0], " ji k-part", qmatmul(J, I).z[0, 0])

# %% [markdown]
# The SVD has quaternion unitary factors and real singular values.

# %%
r = qsvd(A)
print("singular values", np.round(r.S, 4))
print("reconstruction error", np.abs(r.reconstruct().data - A.data).max())
print("unitarity of U, V", unitarity_error(r.U), unitarity_error(r.V))

# %% [markdown]
# A product of thin factors has low rank.

# %%
B = qmatmul(QTensor(rng.standard_normal((4, 6, 2))), QTensor(rng.standard_normal((4, 2, 5))))
print("rank", qsvd(B).rank(), "values", np.round(qsvd(B).S, 6))
print("B^H has the same values", np.allclose(qsvd(conj_transpose(B)).S, qsvd(B).S))
