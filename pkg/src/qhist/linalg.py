"""Dense complex linear algebra for small quantum systems.

Operators and states are bare numpy arrays of dtype complex128: matrices are
2-D, kets 1-D.  Dimensions in this package stay tiny (a few qubits), so
everything is eager and dense; no sparsity or lazy evaluation is attempted.
All functions are pure and never mutate their arguments.
"""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from .errors import ShapeError

__all__ = [
    "as_matrix",
    "as_ket",
    "matmul",
    "kron",
    "dagger",
    "trace",
    "partial_trace",
    "is_projector",
    "is_hermitian",
    "is_unitary",
    "max_abs",
    "identity",
    "pauli",
    "basis_ket",
    "qubit_ket",
    "projector",
    "bell_pair_ket",
    "maximally_mixed",
]

DEFAULT_TOL = 1e-9


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def as_ket(v, *, normalized: bool = False, tol: float = 1e-9) -> np.ndarray:
    """Coerce to a 1-D complex vector, optionally enforcing unit norm."""
    k = np.asarray(v, dtype=complex)
    if k.ndim != 1 or k.size == 0:
        raise ShapeError(f"expected a nonempty 1-D ket, got shape {k.shape}")
    if not np.all(np.isfinite(k.real)) or not np.all(np.isfinite(k.imag)):
        raise ValueError("ket entries must be finite")
    if normalized and abs(np.linalg.norm(k) - 1.0) > tol:
        raise ValueError(f"ket is not normalized: |v| = {np.linalg.norm(k)}")
    return k


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    """Kronecker product, row-major block convention."""
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def partial_trace(a, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``dims`` are the factor dimensions in order; ``keep`` is a collection of
    factor indices.  Kept factors preserve their original order.  ``keep`` may
    be empty, in which case a 1x1 matrix holding the full trace is returned.
    """
    a = as_matrix(a)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ShapeError(f"factor dimensions must be positive, got {dims}")
    total = math.prod(dims)
    if a.shape != (total, total):
        raise ShapeError(f"matrix shape {a.shape} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if keep and (keep[0] < 0 or keep[-1] >= len(dims)):
        raise ShapeError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = a.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]  # repeated index: summed by einsum
    out = [row[i] for i in keep] + [col[i] for i in keep]
    r = np.einsum(t, row + col, out)
    d_keep = math.prod(dims[k] for k in keep) if keep else 1
    return np.asarray(r, dtype=complex).reshape(d_keep, d_keep)


def max_abs(a) -> float:
    """Entrywise max-modulus norm, used for all tolerance checks."""
    return float(np.max(np.abs(a))) if np.asarray(a).size else 0.0


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and max_abs(a - a.conj().T) <= tol


def is_unitary(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs(a.conj().T @ a - np.eye(a.shape[0])) <= tol


def is_projector(a, tol: float = DEFAULT_TOL) -> bool:
    """Hermitian and idempotent within ``tol`` (entrywise max modulus)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs(a - a.conj().T) <= tol and max_abs(a @ a - a) <= tol


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> np.ndarray:
    try:
        return _PAULIS[name.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli name {name!r}") from None


def basis_ket(index: int, dim: int = 2) -> np.ndarray:
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    k = np.zeros(dim, dtype=complex)
    k[index] = 1.0
    return k


_QUBIT_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    "i+": np.array([1, 1j], dtype=complex) / math.sqrt(2),
    "i-": np.array([1, -1j], dtype=complex) / math.sqrt(2),
}


def qubit_ket(name: str) -> np.ndarray:
    try:
        return _QUBIT_KETS[name].copy()
    except KeyError:
        raise ValueError(f"unknown qubit state name {name!r}") from None


def projector(ket) -> np.ndarray:
    k = as_ket(ket)
    return np.outer(k, k.conj())


def bell_pair_ket() -> np.ndarray:
    """(|00> + |11>)/sqrt(2) on two qubits."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return v


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def kron_all(mats) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise ValueError("need at least one factor")
    return reduce(np.kron, mats)
