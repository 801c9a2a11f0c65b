"""Dense third-order tensors.

Layout
------
A :class:`Tensor3` of shape ``(I, J, K)`` is stored as a Fortran-ordered
float64 array, so the first index varies fastest in memory and each frontal
slice ``A[:, :, k]`` is a contiguous column-major matrix.  Element access is
always ``A[i, j, k]``.

Unfoldings follow the Kolda-Bader convention: the mode-``n`` unfolding
``X_(n)`` has shape ``I_n x prod(other extents)`` and the column index of
element ``(i_1, i_2, i_3)`` is built from the remaining indices with the
lower-numbered mode varying fastest.  For mode 1 that is column ``j + J*k``,
so for a rank-one tensor ``X_(1) = u (w kron v)^T``.
"""
from __future__ import annotations

import numpy as np


class Tensor3:
    """Immutable dense ``I x J x K`` array."""

    __slots__ = ("_data",)

    def __init__(self, data):
        a = np.array(data, dtype=float, order="F", copy=True)
        if a.ndim != 3:
            raise ValueError(f"expected a 3-way array, got ndim={a.ndim}")
        a.setflags(write=False)
        self._data = a

    @classmethod
    def zeros(cls, shape) -> "Tensor3":
        return cls(np.zeros(shape))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._data.shape

    dims = shape

    def __getitem__(self, idx):
        return self._data[idx]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __mul__(self, c):
        return Tensor3(self._data * float(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Tensor3(shape={self.shape}, norm={frobenius_norm(self):.6g})"


def as_array(t) -> np.ndarray:
    a = t.data if isinstance(t, Tensor3) else np.asarray(t, dtype=float)
    if a.ndim != 3:
        raise ValueError(f"expected a 3-way array, got ndim={a.ndim}")
    return a


def from_multinet(m) -> Tensor3:
    """Stack the layers of a MultiNet as frontal slices: ``A[i, j, k] = w_ij^(k)``."""
    return Tensor3(np.stack([g.weights for g in m.layers], axis=2))


def frontal_slice(t, k: int) -> np.ndarray:
    a = as_array(t)
    if not 0 <= k < a.shape[2]:
        raise IndexError(f"slice {k} out of range for K={a.shape[2]}")
    return a[:, :, k]


def frobenius_norm(t) -> float:
    """Square root of the sum of squared entries; also accepts a matrix slice."""
    a = t.data if isinstance(t, Tensor3) else np.asarray(t, dtype=float)
    return float(np.sqrt(np.vdot(a, a)))


def outer3(u, v, w) -> Tensor3:
    return Tensor3(np.einsum("i,j,k->ijk", np.asarray(u, float), np.asarray(v, float), np.asarray(w, float)))


def _vec(x, n, what):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"{what} must have length {n}, got shape {x.shape}")
    return x


def contract2(t, a, tvec) -> np.ndarray:
    """``result_i = sum_jk A[i,j,k] a_j t_k`` (tensor times vectors in modes 2 and 3)."""
    x = as_array(t)
    _, J, K = x.shape
    return np.einsum("ijk,j,k->i", x, _vec(a, J, "a"), _vec(tvec, K, "t"))


def contract1(t, h, tvec) -> np.ndarray:
    """``result_j = sum_ik A[i,j,k] h_i t_k`` (modes 1 and 3)."""
    x = as_array(t)
    I, _, K = x.shape
    return np.einsum("ijk,i,k->j", x, _vec(h, I, "h"), _vec(tvec, K, "t"))


def contract12(t, h, a) -> np.ndarray:
    """``result_k = sum_ij A[i,j,k] h_i a_j`` (modes 1 and 2)."""
    x = as_array(t)
    I, J, _ = x.shape
    return np.einsum("ijk,i,j->k", x, _vec(h, I, "h"), _vec(a, J, "a"))


def _check_mode(mode):
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")
    return mode - 1


def mode_unfold(t, mode: int) -> np.ndarray:
    """Mode-``n`` matricization (modes numbered 1..3), see module docstring."""
    n = _check_mode(mode)
    a = as_array(t)
    return np.reshape(np.moveaxis(a, n, 0), (a.shape[n], -1), order="F")


def mode_fold(mat, mode: int, shape) -> Tensor3:
    """Inverse of :func:`mode_unfold` for a target ``shape``."""
    n = _check_mode(mode)
    shape = tuple(shape)
    moved = (shape[n],) + tuple(s for i, s in enumerate(shape) if i != n)
    return Tensor3(np.moveaxis(np.reshape(np.asarray(mat, float), moved, order="F"), 0, n))


def mode_product(t, mat, mode: int) -> Tensor3:
    """n-mode product ``t x_n M``: mode ``n`` of ``t`` is mapped through ``M``."""
    n = _check_mode(mode)
    a = as_array(t)
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[1] != a.shape[n]:
        raise ValueError(f"matrix shape {m.shape} incompatible with mode-{mode} extent {a.shape[n]}")
    shape = list(a.shape)
    shape[n] = m.shape[0]
    return mode_fold(m @ mode_unfold(a, mode), mode, shape)


def multi_mode_product(t, u, v, w) -> Tensor3:
    """``t x_1 U x_2 V x_3 W``."""
    return Tensor3(np.einsum("pqr,ip,jq,kr->ijk", as_array(t), u, v, w, optimize=True))


def khatri_rao(a, b) -> np.ndarray:
    """Column-wise Kronecker product; rows indexed with ``b``'s index fastest."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape[1] != b.shape[1]:
        raise ValueError("khatri_rao needs equal column counts")
    return np.einsum("ir,jr->ijr", a, b).reshape(-1, a.shape[1])


# ---------------------------------------------------------------------------
# Text serialization: "I J K" header, then "i j k value" for each nonzero.
# ---------------------------------------------------------------------------


def write_tensor(t, path) -> None:
    a = as_array(t)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%d %d %d\n" % a.shape)
        for k in range(a.shape[2]):
            for j in range(a.shape[1]):
                for i in np.flatnonzero(a[:, j, k]):
                    fh.write(f"{i} {j} {k} {a[i, j, k]:.17g}\n")


def read_tensor(path) -> Tensor3:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}:1: expected 'I J K' header")
        shape = tuple(int(x) for x in header)
        a = np.zeros(shape, order="F")
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'i j k value'")
            i, j, k = (int(x) for x in parts[:3])
            a[i, j, k] = float(parts[3])
    return Tensor3(a)
