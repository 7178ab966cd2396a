"""
SPD matrix geometry

Provides the primitives every solver builds on:
- Validating constructors for SPD and symmetric matrices
- Eigendecomposition-based matrix functions (exp, log, sqrt, invsqrt, inv)
- Affine-invariant metric: inner product, exponential/logarithm maps,
  geodesic distance and geodesic interpolation
- Log-Euclidean distance and the isometric vectorization of symmetric matrices

Matrices are plain float64 numpy arrays. Arrays returned by this module are
read-only so they can be shared freely between threads.
"""

from functools import lru_cache
from typing import Literal, NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgError, eigh

from .exceptions import (
    DegenerateMatrix,
    DimensionMismatch,
    EigenDecompositionError,
    InvalidSpd,
)

SpdMatrix = NDArray[np.float64]
SymMatrix = NDArray[np.float64]

SYM_TOL = 1e-9
EIG_TOL = 1e-12
PD_FLOOR_REL = 1e-12

MatrixFunction = Literal["exp", "log", "sqrt", "invsqrt", "inv"]


class EigenPair(NamedTuple):
    values: NDArray[np.float64]
    vectors: NDArray[np.float64]


def pd_floor(max_eigenvalue):
    """Smallest eigenvalue a matrix may have and still count as positive definite."""
    return PD_FLOOR_REL * max(float(max_eigenvalue), 1.0)


def _frozen(a):
    a.setflags(write=False)
    return a


def _square(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidSpd(f"{name} has non-finite entries")
    return a


def _check_same_dim(*mats):
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"matrices must share one shape, got {sorted(dims)}")


def as_sym(a, name="matrix"):
    """Return a read-only symmetric copy of `a`.

    Entries may differ from their transpose by up to SYM_TOL relative; such
    matrices are symmetrized as (A + Aᵀ)/2. Larger asymmetries are rejected.
    """
    a = _square(a, name)
    gap = np.abs(a - a.T)
    if np.any(gap > SYM_TOL * np.maximum(1.0, np.abs(a))):
        raise InvalidSpd(f"{name} is not symmetric (max asymmetry {gap.max():.3e})")
    return _frozen((a + a.T) / 2.0)


def as_spd(a, name="matrix"):
    """Return a read-only symmetric positive definite copy of `a` or raise InvalidSpd."""
    a = as_sym(a, name)
    values = np.linalg.eigvalsh(a)
    if values[0] <= pd_floor(values[-1]):
        raise InvalidSpd(
            f"{name} is not positive definite (min eigenvalue {values[0]:.3e})",
            min_eigenvalue=float(values[0]),
        )
    return a


def is_spd(a):
    try:
        as_spd(a)
    except (InvalidSpd, DimensionMismatch):
        return False
    return True


def sym_eig(a):
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    a = np.asarray(a, dtype=np.float64)
    try:
        values, vectors = eigh(a, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise EigenDecompositionError(f"symmetric eigendecomposition failed: {exc}") from exc
    return EigenPair(values, vectors)


def _reassemble(pair, mapped):
    q = pair.vectors
    out = (q * mapped) @ q.T
    return (out + out.T) / 2.0


def _require_positive(pair, fn):
    lo, hi = pair.values[0], pair.values[-1]
    if lo <= pd_floor(hi):
        raise DegenerateMatrix(
            f"matrix {fn} needs a positive definite input (min eigenvalue {lo:.3e})",
            min_eigenvalue=float(lo),
        )


_SCALAR_FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "invsqrt": lambda v: 1.0 / np.sqrt(v),
    "inv": lambda v: 1.0 / v,
}


def spd_fn(a, fn: MatrixFunction):
    """Apply a scalar function to the eigenvalues of a symmetric matrix.

    `exp` accepts any symmetric matrix; the other functions require a positive
    definite input and raise DegenerateMatrix otherwise.
    """
    try:
        scalar = _SCALAR_FUNCTIONS[fn]
    except KeyError:
        raise ValueError(f"unknown matrix function {fn!r}") from None
    pair = sym_eig(a)
    if fn != "exp":
        _require_positive(pair, fn)
    return _frozen(_reassemble(pair, scalar(pair.values)))


def expm(a):
    return spd_fn(a, "exp")


def logm(a):
    return spd_fn(a, "log")


def sqrtm(a):
    return spd_fn(a, "sqrt")


def invsqrtm(a):
    return spd_fn(a, "invsqrt")


def inv_spd(a):
    return spd_fn(a, "inv")


def whiten(y):
    """Return (Y^{1/2}, Y^{-1/2}) from a single eigendecomposition."""
    pair = sym_eig(y)
    _require_positive(pair, "sqrt")
    root = np.sqrt(pair.values)
    return _frozen(_reassemble(pair, root)), _frozen(_reassemble(pair, 1.0 / root))


def _powm_positive(a, t):
    pair = sym_eig(a)
    _require_positive(pair, "power")
    return _reassemble(pair, np.exp(t * np.log(pair.values)))


def airm_inner(y, x, z):
    """Affine-invariant inner product Tr(Y⁻¹ x Y⁻¹ z) of tangent vectors at Y."""
    y, x, z = np.asarray(y, float), np.asarray(x, float), np.asarray(z, float)
    _check_same_dim(y, x, z)
    y_inv = inv_spd(y)
    a = y_inv @ x
    b = y_inv @ z
    return float(np.sum(a * b.T))


def airm_norm(y, x):
    return float(np.sqrt(max(airm_inner(y, x, x), 0.0)))


def exp_map(y, z):
    """Map the tangent vector `z` at Y onto the manifold."""
    y, z = np.asarray(y, float), np.asarray(z, float)
    _check_same_dim(y, z)
    root, inv_root = whiten(y)
    out = root @ expm(inv_root @ z @ inv_root) @ root
    return _frozen((out + out.T) / 2.0)


def log_map(y, z):
    """Map the manifold point Z to the tangent space at Y."""
    y, z = np.asarray(y, float), np.asarray(z, float)
    _check_same_dim(y, z)
    root, inv_root = whiten(y)
    out = root @ logm(inv_root @ z @ inv_root) @ root
    return _frozen((out + out.T) / 2.0)


def geodesic_dist(x, y):
    """Affine-invariant geodesic distance sqrt(Tr(log²(X^{-1/2} Y X^{-1/2})))."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    _check_same_dim(x, y)
    inv_root = invsqrtm(x)
    values = sym_eig(inv_root @ y @ inv_root).values
    if values[0] <= pd_floor(values[-1]):
        raise DegenerateMatrix(
            f"geodesic distance needs positive definite inputs (min eigenvalue {values[0]:.3e})",
            min_eigenvalue=float(values[0]),
        )
    return float(np.sqrt(np.sum(np.log(values) ** 2)))


def le_dist(x, y):
    """Log-Euclidean distance ‖log X − log Y‖_F."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    _check_same_dim(x, y)
    return float(np.linalg.norm(logm(x) - logm(y), "fro"))


@lru_cache(maxsize=64)
def _vec_index(d):
    # column-wise walk of the upper triangle: (0,0), (0,1), (1,1), (0,2), ...
    cols, rows = np.tril_indices(d)
    scale = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return rows, cols, scale


def le_vectorize(a):
    """Isometric vectorization of symmetric matrices.

    Returns [a11, √2·a12, a22, √2·a13, √2·a23, a33, ...] so that dot products of
    vectors equal Frobenius inner products of the matrices. Accepts a single
    (d, d) matrix or a stack (..., d, d).
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    rows, cols, scale = _vec_index(a.shape[-1])
    return a[..., rows, cols] * scale


def geodesic_point(x, y, t):
    """Point at parameter t on the geodesic from X (t=0) to Y (t=1); t > 1 extrapolates."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    _check_same_dim(x, y)
    root, inv_root = whiten(x)
    out = root @ _powm_positive(inv_root @ y @ inv_root, float(t)) @ root
    return _frozen((out + out.T) / 2.0)


def le_unvectorize(v, dim):
    """Inverse of le_vectorize for a single vector."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != dim * (dim + 1) // 2:
        raise DimensionMismatch(f"vector of length {v.size} does not hold a {dim}x{dim} symmetric matrix")
    rows, cols, scale = _vec_index(dim)
    out = np.zeros((dim, dim))
    out[rows, cols] = v / scale
    out[cols, rows] = v / scale
    return out
