"""Quaternion scalars and order-N quaternion tensors.

A :class:`QTensor` keeps its four real components in one float64 array of
shape ``(4, *shape)`` (w, x, y, z along the leading axis). Whenever a flat
ordering is needed (file I/O, unfoldings) the first tensor index runs
fastest, i.e. Fortran order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch


def hamilton(a, b):
    """Hamilton product of component stacks ``a`` and ``b`` (leading axis 4)."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


_CONJ_SIGN = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(v) for v in arr)
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(hamilton(self.to_array(), other.to_array()))
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other):
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def modulus(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    @property
    def real(self) -> float:
        return self.w

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.to_array(), other.to_array(), rtol=0.0, atol=atol))


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    return a * b


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def modulus(q: Quaternion) -> float:
    return q.modulus()


class QTensor:
    """Order-N quaternion tensor stored as four aligned real arrays.

    Instances are read-only; every operation returns a new tensor.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim < 1 or arr.shape[0] != 4:
            raise ShapeMismatch(f"component stack must have leading axis 4, got {arr.shape}")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "QTensor":
        # no-copy constructor for freshly computed float64 arrays
        obj = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        arr.setflags(write=False)
        obj._data = arr
        return obj

    @classmethod
    def from_parts(cls, w=None, x=None, y=None, z=None, shape=None) -> "QTensor":
        parts = [w, x, y, z]
        if shape is None:
            ref = next((p for p in parts if p is not None), None)
            if ref is None:
                raise ShapeMismatch("need at least one component or an explicit shape")
            shape = np.shape(ref)
        shape = tuple(int(s) for s in shape)
        out = np.zeros((4,) + shape)
        for i, p in enumerate(parts):
            if p is None:
                continue
            p = np.asarray(p, dtype=np.float64)
            if p.shape != shape:
                raise ShapeMismatch(f"component {i} has shape {p.shape}, expected {shape}")
            out[i] = p
        return cls._wrap(out)

    @classmethod
    def zeros(cls, shape) -> "QTensor":
        return cls._wrap(np.zeros((4,) + tuple(shape)))

    @classmethod
    def real(cls, arr) -> "QTensor":
        return cls.from_parts(w=arr)

    @classmethod
    def pure(cls, x, y, z) -> "QTensor":
        return cls.from_parts(x=x, y=y, z=z)

    @classmethod
    def from_cayley_dickson(cls, qa, qb) -> "QTensor":
        qa = np.asarray(qa)
        qb = np.asarray(qb)
        if qa.shape != qb.shape:
            raise ShapeMismatch(f"Cayley-Dickson parts differ in shape: {qa.shape} vs {qb.shape}")
        return cls._wrap(np.stack([qa.real, qa.imag, qb.real, qb.imag]))

    @classmethod
    def from_flat(cls, comps, shape) -> "QTensor":
        """Build from four flat arrays laid out first-index-fastest."""
        comps = np.asarray(comps, dtype=np.float64).reshape(4, -1)
        shape = tuple(int(s) for s in shape)
        if comps.shape[1] != int(np.prod(shape, dtype=np.int64)):
            raise ShapeMismatch(f"{comps.shape[1]} entries do not fill shape {shape}")
        return cls._wrap(np.stack([c.reshape(shape, order="F") for c in comps]))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple:
        return self._data.shape[1:]

    @property
    def ndim(self) -> int:
        return self._data.ndim - 1

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def w(self) -> np.ndarray:
        return self._data[0]

    @property
    def x(self) -> np.ndarray:
        return self._data[1]

    @property
    def y(self) -> np.ndarray:
        return self._data[2]

    @property
    def z(self) -> np.ndarray:
        return self._data[3]

    def flat(self) -> np.ndarray:
        """Components as a ``(4, size)`` array, first index fastest."""
        return np.stack([c.ravel(order="F") for c in self._data])

    def is_pure(self) -> bool:
        return not np.any(self._data[0])

    def cayley_dickson(self):
        """Return ``(Q_a, Q_b)`` with ``Q = Q_a + Q_b j``."""
        d = self._data
        return d[0] + 1j * d[1], d[2] + 1j * d[3]

    def modulus(self) -> np.ndarray:
        return np.sqrt(np.sum(self._data**2, axis=0))

    def conj(self) -> "QTensor":
        return QTensor._wrap(self._data * _CONJ_SIGN.reshape((4,) + (1,) * self.ndim))

    def entry(self, *idx) -> Quaternion:
        return Quaternion.from_array(self._data[(slice(None),) + tuple(idx)])

    def __getitem__(self, idx) -> "QTensor":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return QTensor._wrap(np.array(self._data[(slice(None),) + idx]))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return QTensor._wrap(-self._data)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            raise TypeError("use scale_quat_left / scale_quat_right for quaternion scalars")
        return scale_real(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return scale_real(self, 1.0 / other)

    def __repr__(self) -> str:
        return f"QTensor(shape={self.shape})"

    def copy(self) -> "QTensor":
        return QTensor._wrap(self._data.copy())


def _check_same(a: QTensor, b: QTensor):
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")


def add(a: QTensor, b) -> QTensor:
    if isinstance(b, QTensor):
        _check_same(a, b)
        return QTensor._wrap(a.data + b.data)
    if isinstance(b, Quaternion):
        return QTensor._wrap(a.data + b.to_array().reshape((4,) + (1,) * a.ndim))
    # real scalar adds to the real part only
    out = a.data.copy()
    out[0] += b
    return QTensor._wrap(out)


def sub(a: QTensor, b) -> QTensor:
    if isinstance(b, QTensor):
        _check_same(a, b)
        return QTensor._wrap(a.data - b.data)
    return add(a, -b)


def scale_real(a: QTensor, c) -> QTensor:
    return QTensor._wrap(a.data * float(c))


def scale_quat_left(a: QTensor, q: Quaternion) -> QTensor:
    """Every entry multiplied on the left by ``q``."""
    qa = q.to_array().reshape((4,) + (1,) * a.ndim)
    return QTensor._wrap(hamilton(np.broadcast_to(qa, a.data.shape), a.data))


def scale_quat_right(a: QTensor, q: Quaternion) -> QTensor:
    qa = q.to_array().reshape((4,) + (1,) * a.ndim)
    return QTensor._wrap(hamilton(a.data, np.broadcast_to(qa, a.data.shape)))


def hadamard(a: QTensor, b: QTensor) -> QTensor:
    """Entrywise Hamilton product ``a[idx] * b[idx]``."""
    _check_same(a, b)
    return QTensor._wrap(hamilton(a.data, b.data))


def inner(a: QTensor, b: QTensor) -> Quaternion:
    """Right inner product ``sum(conj(a) * b)``; conjugates the first argument."""
    _check_same(a, b)
    prod = hamilton(a.conj().data, b.data)
    return Quaternion.from_array(prod.reshape(4, -1).sum(axis=1))


def real_inner(a: QTensor, b: QTensor) -> float:
    """Real part of :func:`inner`; the componentwise dot product."""
    _check_same(a, b)
    return float(np.vdot(a.data, b.data))


def fro_norm(a: QTensor) -> float:
    return float(np.sqrt(np.sum(a.data**2)))


def linf_norm(a: QTensor) -> float:
    if a.size == 0:
        return 0.0
    return float(a.modulus().max())


def cayley_dickson_split(a: QTensor):
    return a.cayley_dickson()


def cayley_dickson_join(qa, qb) -> QTensor:
    return QTensor.from_cayley_dickson(qa, qb)
