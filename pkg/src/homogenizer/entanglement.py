"""Two-qubit entanglement monotones.

The closed forms follow Wootters: with ``rho~`` the spin-flipped state and
``lam_1 >= ... >= lam_4`` the square roots of the eigenvalues of
``rho rho~``, the concurrence is ``max(0, lam_1 - lam_2 - lam_3 - lam_4)``
and the concurrence of assistance is ``sum(lam_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .linalg import as_operator, herm_eig
from .states import _YY

_CLAMP = 1e-10


def _two_qubit(rho) -> np.ndarray:
    rho = as_operator(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatchError(f"expected a two-qubit state, got shape {rho.shape}")
    return rho


def _factor(rho: np.ndarray) -> np.ndarray:
    """``W`` with ``rho = W W^dagger``, columns ``sqrt(w_i) e_i``."""
    w, e = herm_eig(rho)
    if w[-1] < -_CLAMP:
        raise PreconditionError(f"state has eigenvalue {w[-1]:.3g}")
    return e * np.sqrt(np.clip(w, 0.0, None))


def wootters_lambdas(rho) -> np.ndarray:
    """Descending square roots of the spectrum of ``rho @ spin_flip(rho)``.

    These are the singular values of ``tau = W^T (Y x Y) W`` for any factor
    ``rho = W W^dagger``, which stays accurate on rank-deficient states where
    taking square roots of tiny eigenvalues would not.
    """
    big_w = _factor(_two_qubit(rho))
    return np.linalg.svd(big_w.T @ _YY @ big_w, compute_uv=False)


def concurrence(rho) -> float:
    lam = wootters_lambdas(rho)
    c = lam[0] - lam[1:].sum()
    return float(min(max(c, 0.0), 1.0))


def concurrence_of_assistance(rho) -> float:
    return float(min(wootters_lambdas(rho).sum(), 1.0))


def pure_concurrence(psi) -> float:
    """``|<psi*| Y x Y |psi>|`` for a normalized two-qubit vector."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    return float(abs(psi @ _YY @ psi))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def entanglement_of_formation(rho) -> float:
    c = concurrence(rho)
    return binary_entropy(0.5 * (1 + np.sqrt(max(0.0, 1 - c * c))))


@dataclass
class Decomposition:
    """Pure-state ensemble ``{(p_k, psi_k)}``; ``states`` holds one vector per row."""

    probabilities: np.ndarray
    states: np.ndarray

    def density_matrix(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.probabilities, self.states, self.states.conj())

    def average_concurrence(self) -> float:
        return float(sum(p * pure_concurrence(s) for p, s in zip(self.probabilities, self.states)))


def _polar(v: np.ndarray) -> np.ndarray:
    """Nearest isometry (orthonormal columns) to each matrix in a stack."""
    u, _, vh = np.linalg.svd(v, full_matrices=False)
    return u @ vh


def _objective(v: np.ndarray, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # z[r, k] = v_k^T tau v_k; concurrence of the unnormalized member k is |z|
    tv = np.einsum("ij,rkj->rki", tau, v)
    z = np.einsum("rki,rki->rk", v, tv)
    return np.abs(z).sum(axis=1), z


def eoa_search(rho, ensemble_size: int = 8, restarts: int = 20, seed=0,
               iterations: int = 300, rank_tol: float = 1e-10) -> tuple[float, Decomposition]:
    """Maximize the average concurrence over pure-state decompositions.

    Every decomposition of ``rho = W W^dagger`` (``W = [sqrt(w_i) e_i]`` from
    the eigendecomposition) has the form ``psi~_k = W v_k`` for the rows
    ``v_k`` of an ``m x rank`` isometry, and the member concurrence is
    ``|v_k^T (W^T YY W) v_k|``. Random isometries are improved by projected
    gradient ascent with step halving, one independent walk per restart.

    Returns the best value and the decomposition achieving it.
    """
    rho = _two_qubit(rho)
    w, e = herm_eig(rho)
    rank = int(np.sum(w > rank_tol))
    if ensemble_size < rank:
        raise PreconditionError(f"ensemble_size={ensemble_size} < rank {rank}")
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")
    big_w = e[:, :rank] * np.sqrt(w[:rank])
    tau = big_w.T @ _YY @ big_w
    if rank == 1:
        psi = e[:, 0]
        return pure_concurrence(psi), Decomposition(np.ones(1), psi[None, :])

    rng = np.random.default_rng(seed)
    shape = (restarts, ensemble_size, rank)
    v = _polar(rng.normal(size=shape) + 1j * rng.normal(size=shape))
    f, z = _objective(v, tau)
    step = np.full(restarts, 0.5)
    for _ in range(iterations):
        phase = np.where(np.abs(z) > 1e-15, z / np.maximum(np.abs(z), 1e-300), 1.0)
        grad = phase[..., None] * np.einsum("ij,rkj->rki", tau, v).conj()
        cand = _polar(v + step[:, None, None] * grad)
        f_new, z_new = _objective(cand, tau)
        better = f_new > f
        v = np.where(better[:, None, None], cand, v)
        f = np.where(better, f_new, f)
        z = np.where(better[:, None], z_new, z)
        step = np.where(better, step * 1.2, step * 0.5)
        if np.all(step < 1e-9):
            break

    best = int(np.argmax(f))
    psi = v[best] @ big_w.T
    p = np.real(np.einsum("ki,ki->k", psi, psi.conj()))
    keep = p > 1e-15
    states = psi[keep] / np.sqrt(p[keep])[:, None]
    decomposition = Decomposition(p[keep] / p[keep].sum(), states)
    return float(f[best]), decomposition
