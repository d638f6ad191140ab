"""Dense complex linear algebra for small multi-qubit operators.

Operators are plain ``numpy`` arrays of shape ``(dim, dim)``. Tensor factors
use big-endian ordering: factor 0 is the most significant index, so for
``kron(a, b)`` the row index is ``i_a * dim_b + i_b``.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, NotPSDError, PreconditionError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


def as_operator(a) -> np.ndarray:
    """Return ``a`` as a square complex128 array, raising on bad shapes."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionMismatchError(f"dimension {dim} is not a power of two")
    return n


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more operators, left factor slowest."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=np.complex128) for o in ops))


def _check_shape(dim: int, shape: Sequence[int] | None) -> tuple[int, ...]:
    if shape is None:
        return (2,) * num_qubits(dim)
    shape = tuple(int(d) for d in shape)
    if any(d < 1 for d in shape) or int(np.prod(shape)) != dim:
        raise DimensionMismatchError(
            f"factor shape {shape} does not match operator dimension {dim}")
    return shape


def partial_trace(rho, keep: Iterable[int], shape: Sequence[int] | None = None) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Square operator on the tensor product described by ``shape``.
    keep : iterable of int
        Factor indices to retain. Output factors stay in ascending order.
    shape : sequence of int, optional
        Subsystem dimensions; defaults to all qubits.

    Returns
    -------
    numpy.ndarray
        Reduced operator. Keeping nothing returns the ``1x1`` scalar trace.
    """
    rho = as_operator(rho)
    shape = _check_shape(rho.shape[0], shape)
    n = len(shape)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatchError(f"keep={keep} out of range for {n} factors")

    t = rho.reshape(shape + shape)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = int(np.prod([shape[k] for k in keep])) if keep else 1
    return reduced.reshape(d, d)


def hermiticity_error(h) -> float:
    h = as_operator(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def herm_eig(h, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v^dagger`` and the columns of
    ``v`` ordered like ``w``.
    """
    h = as_operator(h)
    err = hermiticity_error(h)
    if err > tol:
        raise PreconditionError(f"matrix is not Hermitian (max |h - h^dag| = {err:.3g})")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def sqrt_psd(m, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as round-off and clamped to zero.
    """
    w, v = herm_eig(m, tol=tol)
    if w.size and w[-1] < -tol:
        raise NotPSDError(f"matrix has eigenvalue {w[-1]:.3g} < -{tol:g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def l2_distance(a, b) -> float:
    """Frobenius (Hilbert-Schmidt) norm of ``a - b``."""
    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))
