"""Two-step quantum-memory witness for the composite collision machine.

Step 1 collides the system with ancilla 1 and then applies the Fredkin
``(1; 2, 3)``; step 2 collides the system with ancilla 3. The witness compares
the concurrence of assistance of the step-1 Choi state with the concurrence
of the step-2 Choi state. A negative gap means classical memory cannot
reproduce the two-step dynamics.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channels import QubitChannel, apply_gate, check_eta, choi, fredkin, partial_swap
from .errors import PreconditionError
from .linalg import as_operator, partial_trace
from .states import ReservoirInit, build_reservoir
from .entanglement import concurrence, concurrence_of_assistance

WITNESS_ANCILLAS = 3
DEFAULT_GRID_POINTS = 60
CROSSING_TOL = 1e-4
ZERO_TOL = 1e-9


def default_fiducial() -> np.ndarray:
    return np.eye(2, dtype=np.complex128) / 2


def _reservoir(init: ReservoirInit) -> np.ndarray:
    if init.n_qubits < WITNESS_ANCILLAS:
        raise PreconditionError(
            f"witness needs >= {WITNESS_ANCILLAS} ancillas, reservoir has {init.n_qubits}")
    return build_reservoir(init)


def _step1_ops(eta: float):
    return [(partial_swap(eta), (0, 1)), (fredkin(), (1, 2, 3))]


def step1_channel(init: ReservoirInit, eta: float) -> QubitChannel:
    """``rho -> tr_R[(F_{1;2,3} . U_{S,1})(rho x xi_R)]``."""
    eta = check_eta(eta)
    return QubitChannel.from_dilation(_step1_ops(eta), _reservoir(init),
                                      name=f"step1({init.label}, {eta:.6g})")


def reservoir_after_step1(init: ReservoirInit, eta: float, fiducial=None) -> np.ndarray:
    """Reservoir marginal once step 1 has run on the fiducial system input."""
    eta = check_eta(eta)
    fid = default_fiducial() if fiducial is None else as_operator(fiducial)
    joint = np.kron(fid, _reservoir(init))
    for g, w in _step1_ops(eta):
        joint = apply_gate(joint, g, w)
    return partial_trace(joint, range(1, init.n_qubits + 1))


def step2_channel(init: ReservoirInit, eta: float, fiducial=None) -> QubitChannel:
    """``rho -> tr_R[U_{S,3}(rho x sigma_R)]`` with ``sigma_R`` from ``reservoir_after_step1``.

    No second Fredkin is applied; it cannot influence the system at this step.
    """
    eta = check_eta(eta)
    sigma = reservoir_after_step1(init, eta, fiducial)
    return QubitChannel.from_dilation([(partial_swap(eta), (0, 3))], sigma,
                                      name=f"step2({init.label}, {eta:.6g})")


@dataclass(frozen=True)
class GapSample:
    eta: float
    c_assist: float
    c_form: float

    @property
    def gap(self) -> float:
        return self.c_assist - self.c_form


def memory_gap(init: ReservoirInit, eta: float, fiducial=None) -> GapSample:
    c_assist = concurrence_of_assistance(choi(step1_channel(init, eta)))
    c_form = concurrence(choi(step2_channel(init, eta, fiducial)))
    return GapSample(float(eta), c_assist, c_form)


@dataclass
class GapCurve:
    init: ReservoirInit
    samples: list[GapSample] = field(default_factory=list)
    crossing: float | None = None
    fiducial: np.ndarray | None = None

    @property
    def etas(self) -> np.ndarray:
        return np.array([s.eta for s in self.samples])

    @property
    def gaps(self) -> np.ndarray:
        return np.array([s.gap for s in self.samples])

    def to_csv(self) -> str:
        from .dynamics import fmt
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eta", "c_assist_step1", "c_form_step2", "gap"])
        for s in self.samples:
            w.writerow([fmt(s.eta), fmt(s.c_assist), fmt(s.c_form), fmt(s.gap)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"init": self.init.label, "eta_star": self.crossing}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"


def default_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, np.pi / 2, points)


def _check_grid(eta_grid) -> np.ndarray:
    grid = np.asarray(list(eta_grid), dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise PreconditionError("eta grid must be strictly increasing")
    for e in grid:
        check_eta(e)
    return grid


def gap_curve(init: ReservoirInit, eta_grid=None, fiducial=None, map_fn=map) -> GapCurve:
    """Sample ``memory_gap`` over ``eta_grid`` and locate the first sign change.

    ``map_fn`` lets callers fan the grid out to a worker pool; results are
    consumed in grid order.
    """
    grid = _check_grid(default_grid() if eta_grid is None else eta_grid)
    samples = list(map_fn(_GapTask(init, fiducial), grid))
    curve = GapCurve(init, samples, fiducial=fiducial)
    if len(samples) >= 2:
        curve.crossing = find_crossing(curve)
    return curve


@dataclass(frozen=True)
class _GapTask:
    init: ReservoirInit
    fiducial: np.ndarray | None

    def __call__(self, eta: float) -> GapSample:
        return memory_gap(self.init, float(eta), self.fiducial)


def _negative(g: float) -> bool:
    return g < -ZERO_TOL


def find_crossing(curve: GapCurve, gap_fn: Callable[[float], float] | None = None,
                  tol: float = CROSSING_TOL) -> float | None:
    """Smallest ``eta`` at which the gap enters or leaves the negative region.

    The bracketing grid interval is refined by bisection on ``gap_fn``
    (default: ``memory_gap`` for the curve's reservoir and fiducial).
    """
    if len(curve.samples) < 2:
        raise PreconditionError("need at least two samples to find a crossing")
    if gap_fn is None:
        def gap_fn(eta):
            return memory_gap(curve.init, eta, curve.fiducial).gap
    etas, gaps = curve.etas, curve.gaps
    for i in range(len(gaps) - 1):
        if _negative(gaps[i]) != _negative(gaps[i + 1]):
            lo, hi = etas[i], etas[i + 1]
            lo_neg = _negative(gaps[i])
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _negative(gap_fn(mid)) == lo_neg:
                    lo = mid
                else:
                    hi = mid
            return float(0.5 * (lo + hi))
    return None


def fiducial_sweep(init: ReservoirInit, eta_grid=None, n_theta: int = 7,
                   n_phi: int = 8) -> list[tuple[np.ndarray, GapCurve]]:
    """Gap curves for pure fiducial inputs spread over the Bloch sphere."""
    out = []
    for theta in np.linspace(0, np.pi, n_theta):
        phis = [0.0] if theta in (0.0, np.pi) else np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
        for phi in phis:
            psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
            fid = np.outer(psi, psi.conj())
            out.append((fid, gap_curve(init, eta_grid, fid)))
    return out
