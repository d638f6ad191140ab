"""System and reservoir state constructors plus density-matrix validation.

Ancillas are labelled 1..n, matching the collision order. When a reservoir
is embedded next to the system, ancilla ``k`` sits on wire ``k`` and the
system on wire 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .linalg import HERMITIAN_TOL, PSD_TOL, as_operator, kron, num_qubits

TRACE_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)
_YY = np.kron(SIGMA_Y, SIGMA_Y)


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"101"``."""
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1.0
    return v


def pure(psi) -> np.ndarray:
    """Projector onto the normalized vector ``psi``."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise PreconditionError("cannot normalize the zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def bloch_state(r) -> np.ndarray:
    """Single-qubit state ``(I + r.sigma)/2`` for a Bloch vector with ``|r| <= 1``."""
    x, y, z = (float(c) for c in r)
    if x * x + y * y + z * z > 1 + 1e-12:
        raise PreconditionError(f"Bloch vector {r} lies outside the unit ball")
    return 0.5 * (IDENTITY_2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def bloch_vector(rho) -> np.ndarray:
    rho = as_operator(rho)
    return np.real([np.trace(rho @ s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def ghz_ket(n: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=np.complex128)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)


class ReservoirKind(str, Enum):
    PRODUCT = "product"
    BELL = "bell"
    GHZ = "ghz"
    ASYM_GHZ = "asym_ghz"
    PERTURBED_GHZ = "perturbed_ghz"
    X_ERROR_GHZ = "x_error_ghz"


_MIN_QUBITS = {
    ReservoirKind.PRODUCT: 1,
    ReservoirKind.BELL: 2,
    ReservoirKind.GHZ: 3,
    ReservoirKind.ASYM_GHZ: 3,
    ReservoirKind.PERTURBED_GHZ: 3,
    ReservoirKind.X_ERROR_GHZ: 3,
}


@dataclass(frozen=True)
class ReservoirInit:
    """Descriptor of an initial reservoir state.

    ``xi`` is the single-qubit Bloch vector used by product reservoirs.
    ``bell_pair`` picks the two ancillas carrying the Bell pair; ``alpha`` is
    the perturbation weight for the perturbed GHZ state and ``site`` the
    ancilla hit by the X error. All other ancillas start in ``|0>``.
    """

    kind: ReservoirKind
    n_qubits: int = 3
    xi: tuple[float, float, float] = (0.0, 0.0, 1.0)
    alpha: float = 0.0
    site: int = 1
    bell_pair: tuple[int, int] = (1, 2)

    def __post_init__(self):
        object.__setattr__(self, "kind", ReservoirKind(self.kind))
        object.__setattr__(self, "xi", tuple(float(c) for c in self.xi))
        object.__setattr__(self, "bell_pair", tuple(int(c) for c in self.bell_pair))
        if self.n_qubits < _MIN_QUBITS[self.kind]:
            raise PreconditionError(
                f"n_qubits={self.n_qubits} too small for {self.kind.value} "
                f"(needs >= {_MIN_QUBITS[self.kind]})")
        if not 0.0 <= self.alpha <= 1.0:
            raise PreconditionError(f"alpha={self.alpha} outside [0, 1]")
        if self.kind is ReservoirKind.X_ERROR_GHZ and not 1 <= self.site <= self.n_qubits:
            raise PreconditionError(f"site={self.site} outside ancillas 1..{self.n_qubits}")
        if self.kind is ReservoirKind.BELL:
            a, b = self.bell_pair
            if a == b or not (1 <= a <= self.n_qubits and 1 <= b <= self.n_qubits):
                raise PreconditionError(f"invalid bell_pair {self.bell_pair}")
        bloch_state(self.xi)

    @property
    def label(self) -> str:
        k = self.kind
        if k is ReservoirKind.PERTURBED_GHZ:
            return f"{k.value}_alpha{self.alpha:g}"
        if k is ReservoirKind.X_ERROR_GHZ:
            return f"{k.value}_site{self.site}"
        if k is ReservoirKind.BELL and self.bell_pair != (1, 2):
            return f"{k.value}_{self.bell_pair[0]}{self.bell_pair[1]}"
        return k.value

    def with_size(self, n_qubits: int) -> "ReservoirInit":
        from dataclasses import replace
        return replace(self, n_qubits=n_qubits)


def _pad(v: np.ndarray, n_total: int) -> np.ndarray:
    used = num_qubits(v.size)
    if used < n_total:
        v = np.kron(v, basis_ket("0" * (n_total - used)))
    return v


def reservoir_ket(init: ReservoirInit) -> np.ndarray | None:
    """State vector of a pure reservoir, or ``None`` for mixed product states."""
    k, n = init.kind, init.n_qubits
    if k is ReservoirKind.PRODUCT:
        return None
    if k is ReservoirKind.BELL:
        a, b = sorted(init.bell_pair)
        v = np.zeros(2**n, dtype=np.complex128)
        v[0] = 1 / np.sqrt(2)
        v[(1 << (n - a)) | (1 << (n - b))] = 1 / np.sqrt(2)
        return v
    if k is ReservoirKind.GHZ:
        return ghz_ket(n)
    if k is ReservoirKind.ASYM_GHZ:
        v = (basis_ket("000") + basis_ket("101")) / np.sqrt(2)
        return _pad(v, n)
    if k is ReservoirKind.PERTURBED_GHZ:
        v = np.sqrt(init.alpha) * basis_ket("100") + np.sqrt(1 - init.alpha) * ghz_ket(3)
        return _pad(v / np.linalg.norm(v), n)
    if k is ReservoirKind.X_ERROR_GHZ:
        ops = [IDENTITY_2] * n
        ops[init.site - 1] = SIGMA_X
        return kron(*ops) @ ghz_ket(n)
    raise AssertionError(k)


def build_reservoir(init: ReservoirInit) -> np.ndarray:
    """Density matrix of the reservoir on ``init.n_qubits`` ancillas."""
    v = reservoir_ket(init)
    if v is None:
        xi = bloch_state(init.xi)
        return kron(*([xi] * init.n_qubits))
    return pure(v)


def spin_flip(rho) -> np.ndarray:
    """Wootters companion ``(Y x Y) rho^* (Y x Y)`` of a two-qubit operator."""
    rho = as_operator(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatchError(f"spin_flip needs a two-qubit operator, got {rho.shape}")
    return _YY @ rho.conj() @ _YY


@dataclass
class ValidationReport:
    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float
    hermitian_tol: float = HERMITIAN_TOL
    trace_tol: float = TRACE_TOL
    psd_tol: float = PSD_TOL
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.hermiticity_error <= self.hermitian_tol
                and self.trace_error <= self.trace_tol
                and self.min_eigenvalue >= -self.psd_tol)

    def __bool__(self):
        return self.passed


def validate(rho, tol: float | None = None) -> ValidationReport:
    """Report how far ``rho`` is from being a density matrix.

    Never raises on bad content. ``tol`` overrides all three tolerances.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return ValidationReport(np.inf, np.inf, -np.inf, notes=[f"bad shape {rho.shape}"])
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    tr = abs(complex(np.trace(rho)) - 1.0)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    report = ValidationReport(herm, tr, float(w[0]) if w.size else 0.0)
    if tol is not None:
        report.hermitian_tol = report.trace_tol = report.psd_tol = tol
    return report
