import os

import numpy as np

from utils.errors import DimensionCapError, RangeError, ShapeError

# every matrix and vector in the project is a plain complex128 ndarray
DTYPE = np.complex128
DEFAULT_DIM_CAP = 10 ** 7
DIM_CAP_ENV = "QUDITBP_DIM_CAP"
EQ_ATOL = 1e-12


def dimension_cap() -> int:
    """Maximum number of stored entries (amplitudes or matrix elements)."""
    raw = os.environ.get(DIM_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_DIM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise DimensionCapError(f"{DIM_CAP_ENV}={raw!r} is not an integer")
    if cap < 1:
        raise DimensionCapError(f"{DIM_CAP_ENV} must be positive, got {cap}")
    return cap


def check_entry_count(count: int, what: str = "result") -> None:
    cap = dimension_cap()
    if count > cap:
        raise DimensionCapError(f"{what} needs {count} entries, cap is {cap}")


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=DTYPE)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product, capped by the entry budget"""
    a, b = as_matrix(a), as_matrix(b)
    check_entry_count(a.size * b.size, "kron")
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    result = np.ones((1, 1), dtype=DTYPE)
    for factor in factors:
        result = kron(result, factor)
    return result


def trace(a) -> complex:
    a = as_matrix(a)
    rows, cols = a.shape
    if rows != cols:
        raise ShapeError(f"trace of non-square matrix {a.shape}")
    # fixed left-to-right order keeps runs bit-reproducible
    return complex(np.add.reduce(np.diagonal(a).copy()))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose"""
    return as_matrix(a).conj().T


def basis_projector(index: int, dim: int) -> np.ndarray:
    """|index><index| as a dense dim x dim matrix"""
    if dim < 1:
        raise RangeError(f"dimension must be >= 1, got {dim}")
    if not 0 <= index < dim:
        raise RangeError(f"basis index {index} outside [0, {dim})")
    check_entry_count(dim * dim, "basis projector")
    p = np.zeros((dim, dim), dtype=DTYPE)
    p[index, index] = 1.0
    return p


def matrices_equal(a, b, atol: float = EQ_ATOL) -> bool:
    """Element-wise absolute-tolerance equality."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= atol))


def is_hermitian(a, atol: float = 1e-10) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and matrices_equal(a, adjoint(a), atol)


def is_unitary(a, atol: float = 1e-10) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return matrices_equal(a @ adjoint(a), np.eye(a.shape[0]), atol)
