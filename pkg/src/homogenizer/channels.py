"""Gates, wire-targeted application, qubit channels and their Choi states."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .linalg import as_operator, num_qubits, partial_trace
from .states import PHI_PLUS, validate

ETA_MAX = np.pi / 2
UNITARY_TOL = 1e-10
CPTP_TOL = 1e-9

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=np.complex128)
SWAP.setflags(write=False)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def check_eta(eta: float) -> float:
    eta = float(eta)
    if not (0.0 <= eta <= ETA_MAX + 1e-12):
        raise PreconditionError(f"eta={eta} outside [0, pi/2]")
    return min(eta, ETA_MAX)


@lru_cache(maxsize=4096)
def _partial_swap_cached(eta: float) -> np.ndarray:
    return _frozen(np.cos(eta) * np.eye(4, dtype=np.complex128) + 1j * np.sin(eta) * SWAP)


def partial_swap(eta: float) -> np.ndarray:
    """Two-qubit partial SWAP ``cos(eta) I + i sin(eta) SWAP``.

    The returned array is read-only and shared between calls with the same
    ``eta``.
    """
    return _partial_swap_cached(check_eta(eta))


@lru_cache(maxsize=1)
def fredkin() -> np.ndarray:
    """Controlled-SWAP with the control on the first (most significant) qubit."""
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    return _frozen(np.kron(p0, np.eye(4)) + np.kron(p1, SWAP))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_operator(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_wires(n: int, gate: np.ndarray, wires: Sequence[int]) -> list[int]:
    wires = [int(w) for w in wires]
    if len(set(wires)) != len(wires):
        raise PreconditionError(f"wire collision in {wires}")
    if any(w < 0 or w >= n for w in wires):
        raise PreconditionError(f"wires {wires} outside a {n}-qubit register")
    if gate.shape != (2 ** len(wires),) * 2:
        raise PreconditionError(
            f"gate of shape {gate.shape} does not act on {len(wires)} wires")
    return wires


def _apply_left(t: np.ndarray, g: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    out = np.tensordot(g.reshape((2,) * 2 * k), t, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_gate(state, gate, wires: Sequence[int]) -> np.ndarray:
    """Return ``U rho U^dagger`` with ``gate`` acting on ``wires`` of an n-qubit state.

    ``wires[0]`` maps onto the gate's most significant qubit.
    """
    rho = as_operator(state)
    gate = np.asarray(gate, dtype=np.complex128)
    n = num_qubits(rho.shape[0])
    wires = _check_wires(n, gate, wires)
    t = rho.reshape((2,) * 2 * n)
    t = _apply_left(t, gate, wires)
    t = _apply_left(t, gate.conj(), [w + n for w in wires])
    return t.reshape(rho.shape)


def embed(gate, wires: Sequence[int], n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of ``gate`` acting on ``wires``."""
    gate = np.asarray(gate, dtype=np.complex128)
    wires = _check_wires(n, gate, wires)
    t = np.eye(2**n, dtype=np.complex128).reshape((2,) * 2 * n)
    return _apply_left(t, gate, wires).reshape(2**n, 2**n)


@dataclass(frozen=True)
class QubitChannel:
    """A linear map on single-qubit operators.

    Usually built from a Stinespring dilation (``from_dilation``): the
    system sits on wire 0, ``env`` on the remaining wires, ``ops`` are
    applied in order as ``(gate, wires)`` pairs and the environment is traced.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    name: str = "channel"

    def __call__(self, rho) -> np.ndarray:
        return self.apply(as_operator(rho))

    @classmethod
    def from_dilation(cls, ops: Sequence[tuple[np.ndarray, Sequence[int]]], env,
                      name: str = "dilation") -> "QubitChannel":
        env = as_operator(env)
        ops = tuple((np.asarray(g), tuple(w)) for g, w in ops)

        def apply(rho):
            joint = np.kron(rho, env)
            for g, w in ops:
                joint = apply_gate(joint, g, w)
            return partial_trace(joint, [0])

        return cls(apply, name)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], name: str = "kraus") -> "QubitChannel":
        kraus = [as_operator(k) for k in kraus]
        return cls(lambda rho: sum(k @ rho @ k.conj().T for k in kraus), name)

    @classmethod
    def mixture(cls, p: float, a: "QubitChannel", b: "QubitChannel") -> "QubitChannel":
        return cls(lambda rho: p * a(rho) + (1 - p) * b(rho), f"mix({a.name},{b.name})")


def identity_channel() -> QubitChannel:
    return QubitChannel(lambda rho: rho.copy(), "identity")


def transpose_map() -> QubitChannel:
    return QubitChannel(lambda rho: rho.T.copy(), "transpose")


def depolarizing_channel(p: float = 1.0) -> QubitChannel:
    """``rho -> (1 - p) rho + p tr(rho) I/2``."""
    return QubitChannel(lambda rho: (1 - p) * rho + p * np.trace(rho) * np.eye(2) / 2,
                        f"depolarizing({p:g})")


def _basis_outputs(channel: QubitChannel) -> list[list[np.ndarray]]:
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            e = np.zeros((2, 2), dtype=np.complex128)
            e[i, j] = 1.0
            row.append(as_operator(channel(e)))
        out.append(row)
    return out


def _trace_defect(outputs) -> float:
    return max(abs(np.trace(outputs[i][j]) - (1.0 if i == j else 0.0))
               for i in range(2) for j in range(2))


def _choi_from_outputs(outputs) -> np.ndarray:
    c = np.zeros((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            c += np.kron(outputs[i][j], e)
    return c / 2


def choi(channel: QubitChannel) -> np.ndarray:
    """Trace-one Choi state ``(channel x id)|Phi+><Phi+|``.

    The channel output is factor 0, the untouched reference factor 1.
    """
    outputs = _basis_outputs(channel)
    defect = _trace_defect(outputs)
    if defect > CPTP_TOL:
        raise PreconditionError(f"channel {channel.name} is not trace preserving "
                                f"(defect {defect:.3g})")
    return _choi_from_outputs(outputs)


@dataclass
class CPTPReport:
    min_eigenvalue: float
    tp_error: float
    tol: float = CPTP_TOL

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -self.tol and self.tp_error <= self.tol

    def __bool__(self):
        return self.passed


def is_cptp(channel: QubitChannel, tol: float = CPTP_TOL) -> CPTPReport:
    c = _choi_from_outputs(_basis_outputs(channel))
    w = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
    # tracing the output factor must leave the reference maximally mixed
    tp = float(np.max(np.abs(partial_trace(c, [1]) - np.eye(2) / 2)))
    return CPTPReport(float(w[0]), tp, tol)


def choi_is_state(c) -> bool:
    return validate(c, tol=CPTP_TOL).passed


def identity_choi() -> np.ndarray:
    return np.outer(PHI_PLUS, PHI_PLUS.conj())
