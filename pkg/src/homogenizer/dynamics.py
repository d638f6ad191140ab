"""Collision-model dynamics: the Markovian homogenizer, the Fredkin-mediated
composite machine, and the operator-sum interpolation between regimes.

Wire convention for joint states: the system is wire 0 and ancilla ``k`` is
wire ``k``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .channels import ETA_MAX, QubitChannel, apply_gate, check_eta, fredkin, partial_swap
from .errors import NumericalError, PreconditionError
from .linalg import as_operator, l2_distance, partial_trace
from .states import (ReservoirInit, ReservoirKind, bloch_state, build_reservoir, pure,
                     validate)

GAUSSIAN_STD_DEFAULT = 0.1 * np.pi / 2


def derive_seed(root: int, index: int) -> np.random.SeedSequence:
    """Independent stream ``index`` of root seed ``root``.

    Uses ``SeedSequence(root, spawn_key=(index,))``, so stream ``i`` is the
    same whatever other streams exist or which worker draws it.
    """
    return np.random.SeedSequence(int(root), spawn_key=(int(index),))


class ScheduleKind(str, Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class EtaSchedule:
    """Per-step coupling strengths.

    ``fixed`` repeats ``value``; ``uniform`` draws from ``[lo, hi]``;
    ``gaussian`` draws around ``value`` with ``std`` and clips to [0, pi/2].
    """

    kind: ScheduleKind = ScheduleKind.FIXED
    value: float = np.pi / 4
    lo: float = 0.0
    hi: float = ETA_MAX
    std: float = GAUSSIAN_STD_DEFAULT
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if not 0.0 <= self.lo <= self.hi <= ETA_MAX + 1e-12:
            raise PreconditionError(f"uniform bounds [{self.lo}, {self.hi}] outside [0, pi/2]")
        if self.kind is not ScheduleKind.UNIFORM:
            check_eta(self.value)
        if self.std < 0:
            raise PreconditionError(f"std={self.std} must be non-negative")

    @classmethod
    def fixed(cls, eta: float) -> "EtaSchedule":
        return cls(ScheduleKind.FIXED, value=eta)

    @classmethod
    def uniform(cls, seed, lo: float = 0.0, hi: float = ETA_MAX) -> "EtaSchedule":
        return cls(ScheduleKind.UNIFORM, lo=lo, hi=hi, seed=seed)

    @classmethod
    def gaussian(cls, mean: float, seed, std: float = GAUSSIAN_STD_DEFAULT) -> "EtaSchedule":
        return cls(ScheduleKind.GAUSSIAN, value=mean, std=std, seed=seed)

    def sample(self, length: int, stream: int | None = None) -> np.ndarray:
        """Draw ``length`` couplings; ``stream`` selects a derived sub-stream."""
        if self.kind is ScheduleKind.FIXED:
            return np.full(length, float(self.value))
        seq = derive_seed(self.seed, stream) if stream is not None else np.random.SeedSequence(int(self.seed))
        rng = np.random.default_rng(seq)
        if self.kind is ScheduleKind.UNIFORM:
            return rng.uniform(self.lo, self.hi, size=length)
        return np.clip(rng.normal(self.value, self.std, size=length), 0.0, ETA_MAX)


def _etas(schedule, n: int) -> np.ndarray:
    if isinstance(schedule, EtaSchedule):
        etas = schedule.sample(n)
    else:
        etas = np.asarray(list(schedule), dtype=float)
        if etas.size < n:
            raise PreconditionError(f"{etas.size} couplings supplied for {n} steps")
        etas = etas[:n]
    for e in etas:
        check_eta(e)
    return etas


@dataclass
class TrajectoryStep:
    step: int
    eta: float
    rho: np.ndarray
    distance: float


CSV_COLUMNS = ["step", "eta", "dist_l2", "rho00_re", "rho01_re", "rho01_im", "rho11_re"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class Trajectory:
    """Reduced system states after each collision, with their distance to ``target``."""

    initial: np.ndarray
    target: np.ndarray
    steps: list[TrajectoryStep] = field(default_factory=list)

    @property
    def distances(self) -> np.ndarray:
        return np.array([s.distance for s in self.steps])

    @property
    def final(self) -> np.ndarray:
        return self.steps[-1].rho if self.steps else self.initial

    def rows(self) -> list[list[str]]:
        out = []
        for s in self.steps:
            r = s.rho
            out.append([str(s.step), fmt(s.eta), fmt(s.distance), fmt(r[0, 0].real),
                        fmt(r[0, 1].real), fmt(r[0, 1].imag), fmt(r[1, 1].real)])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.rows())
        return buf.getvalue()


def state_from_row(row: dict) -> np.ndarray:
    """Rebuild the reduced system state from one trajectory CSV row."""
    a = float(row["rho00_re"])
    b = float(row["rho01_re"]) + 1j * float(row["rho01_im"])
    d = float(row["rho11_re"])
    return np.array([[a, b], [np.conj(b), d]], dtype=np.complex128)


def _checked(rho: np.ndarray, **context) -> np.ndarray:
    report = validate(rho, tol=1e-9)
    if not report.passed:
        raise NumericalError(
            f"invalid state: herm={report.hermiticity_error:.3g} "
            f"trace={report.trace_error:.3g} min_eig={report.min_eigenvalue:.3g}", **context)
    return rho


def collision_channel(eta: float, xi) -> QubitChannel:
    """Single partial-SWAP collision with a fresh ancilla in ``xi``."""
    return QubitChannel.from_dilation([(partial_swap(eta), (0, 1))], xi,
                                      name=f"collision({eta:.6g})")


def homogenize(rho_s, xi, n: int, schedule) -> Trajectory:
    """Markovian homogenizer: ``n`` collisions, each with a fresh ancilla ``xi``."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    rho = as_operator(rho_s)
    xi = as_operator(xi)
    traj = Trajectory(rho.copy(), xi)
    for k, eta in enumerate(_etas(schedule, n), start=1):
        joint = apply_gate(np.kron(rho, xi), partial_swap(eta), (0, 1))
        rho = _checked(partial_trace(joint, [0]), step=k, eta=eta)
        traj.steps.append(TrajectoryStep(k, float(eta), rho, l2_distance(rho, xi)))
    return traj


@dataclass(frozen=True)
class CollisionPlan:
    """Which ancilla the system meets at each step, and the Fredkin that follows.

    ``fredkin_triples[k]`` is ``(control, target_a, target_b)`` applied after
    collision ``k``; the last collision may have no Fredkin.
    """

    system_targets: tuple[int, ...]
    fredkin_triples: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        t = self.system_targets
        if any(b - a != 2 for a, b in zip(t, t[1:])):
            raise PreconditionError(f"system targets {t} must increase by 2")
        if len(self.fredkin_triples) > len(t):
            raise PreconditionError("more Fredkin triples than collisions")
        for k, (c, a, b) in enumerate(self.fredkin_triples):
            if c != t[k]:
                raise PreconditionError(
                    f"Fredkin control {c} at step {k + 1} is not the collided ancilla {t[k]}")
            if len({c, a, b}) != 3:
                raise PreconditionError(f"Fredkin wires {(c, a, b)} collide")

    @property
    def n_steps(self) -> int:
        return len(self.system_targets)

    @property
    def n_ancillas(self) -> int:
        wires = list(self.system_targets) + [w for tr in self.fredkin_triples for w in tr]
        return max(wires)

    @classmethod
    def default(cls, n: int, trailing_fredkin: bool = False) -> "CollisionPlan":
        """Odd targets 1, 3, ...; Fredkin ``(2k-1; 2k, 2k+1)`` after step ``k``."""
        targets = tuple(range(1, 2 * n, 2))
        n_f = n if trailing_fredkin else n - 1
        triples = tuple((2 * k - 1, 2 * k, 2 * k + 1) for k in range(1, n_f + 1))
        return cls(targets, triples)


def _step_ops(plan: CollisionPlan, k: int, eta: float) -> list[tuple[np.ndarray, tuple]]:
    ops = [(partial_swap(eta), (0, plan.system_targets[k]))]
    if k < len(plan.fredkin_triples):
        ops.append((fredkin(), tuple(plan.fredkin_triples[k])))
    return ops


def reservoir_target(init: ReservoirInit) -> np.ndarray:
    """Single-qubit marginal of ancilla 1, the homogenization target."""
    if init.kind is ReservoirKind.PRODUCT:
        return bloch_state(init.xi)
    return partial_trace(build_reservoir(init), [0])


def evolve_composite(rho_s, init: ReservoirInit, n: int, schedule,
                     plan: CollisionPlan | None = None, check_joint: bool = False,
                     stream: bool | None = None) -> Trajectory:
    """Composite machine: at each step a partial-SWAP collision, then a Fredkin.

    Product reservoirs are streamed: ancillas no longer reachable by any
    later gate are traced out and fresh copies of ``xi`` are appended on
    demand, so ``n`` is unbounded and ``init.n_qubits`` is ignored. Other
    reservoirs keep the full joint state and must hold ``plan.n_ancillas``
    qubits (``2n - 1`` for the default plan). ``stream=False`` forces the
    full joint simulation for product reservoirs too.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    plan = plan or CollisionPlan.default(n)
    if plan.n_steps != n:
        raise PreconditionError(f"plan has {plan.n_steps} steps, expected {n}")
    etas = _etas(schedule, n)
    rho_s = as_operator(rho_s)
    target = reservoir_target(init)
    traj = Trajectory(rho_s.copy(), target)

    streamable = init.kind is ReservoirKind.PRODUCT and plan == CollisionPlan.default(n)
    if stream and not streamable:
        raise PreconditionError("streaming needs a product reservoir and the default plan")
    if streamable and stream is not False:
        xi = bloch_state(init.xi)
        joint = np.kron(rho_s, xi)  # wires: system, current target
        for k, eta in enumerate(etas, start=1):
            joint = apply_gate(joint, partial_swap(eta), (0, 1))
            rho = _checked(partial_trace(joint, [0]), init=init.label, step=k, eta=eta)
            traj.steps.append(TrajectoryStep(k, float(eta), rho, l2_distance(rho, target)))
            if k < n:
                joint = apply_gate(np.kron(joint, np.kron(xi, xi)), fredkin(), (1, 2, 3))
                if check_joint:
                    _checked(joint, init=init.label, step=k, eta=eta)
                joint = partial_trace(joint, [0, 3])
        return traj

    if init.n_qubits < plan.n_ancillas:
        raise PreconditionError(
            f"reservoir of {init.n_qubits} qubits too small for a plan using "
            f"{plan.n_ancillas} ancillas")
    joint = np.kron(rho_s, build_reservoir(init))
    for k, eta in enumerate(etas):
        for g, w in _step_ops(plan, k, eta):
            joint = apply_gate(joint, g, w)
            if check_joint:
                _checked(joint, init=init.label, step=k + 1, eta=eta)
        rho = _checked(partial_trace(joint, [0]), init=init.label, step=k + 1, eta=eta)
        traj.steps.append(TrajectoryStep(k + 1, float(eta), rho, l2_distance(rho, target)))
    return traj


def check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p={p} outside [0, 1]")
    return p


def eta_from_probability(p: float) -> float:
    """Coupling whose swap probability ``sin^2(eta)`` equals ``p``."""
    return float(np.arcsin(np.sqrt(check_probability(p))))


def memory_weights(p: float, n: int) -> np.ndarray:
    """Weights ``(1-p) p^(k-1)`` for k = 1..n-1 followed by ``p^(n-1)``."""
    p = check_probability(p)
    k = np.arange(1, n)
    return np.append((1 - p) * p ** (k - 1), p ** (n - 1))


def operator_sum_trajectory(rho_s, p: float, n: int, xi=None) -> list[np.ndarray]:
    """States ``rho^(0..n)`` of the memory-kernel recursion.

    ``rho^(N) = (1-p) sum_{k<N} p^(k-1) M^k[rho^(N-k)] + p^(N-1) M^N[rho^(0)]``
    where ``M`` is one collision at ``eta = arcsin(sqrt(p))`` with ancilla
    ``xi`` (default ``|0><0|``) and ``M^k`` is its k-fold composition.
    """
    p = check_probability(p)
    if n < 0:
        raise PreconditionError("n must be >= 0")
    xi = pure([1, 0]) if xi is None else as_operator(xi)
    m = collision_channel(eta_from_probability(p), xi)

    def power(rho, k):
        for _ in range(k):
            rho = m(rho)
        return rho

    states = [as_operator(rho_s).copy()]
    for big_n in range(1, n + 1):
        w = memory_weights(p, big_n)
        rho = w[-1] * power(states[0], big_n)
        for k in range(1, big_n):
            if w[k - 1] != 0.0:
                rho = rho + w[k - 1] * power(states[big_n - k], k)
        states.append(_checked(rho, p=p, step=big_n))
    return states


def operator_sum_evolution(rho_s, p: float, n: int, xi=None) -> np.ndarray:
    return operator_sum_trajectory(rho_s, p, n, xi)[-1]


REGIME_COLUMNS = ["p"] + CSV_COLUMNS


def interpolation_sweep(p_grid: Iterable[float], n: int, rho_s=None, xi=None) -> list[Trajectory]:
    """One operator-sum trajectory per ``p``, distances measured to ``xi``."""
    rho_s = pure([0, 1]) if rho_s is None else as_operator(rho_s)
    xi = pure([1, 0]) if xi is None else as_operator(xi)
    out = []
    for p in p_grid:
        states = operator_sum_trajectory(rho_s, p, n, xi)
        eta = eta_from_probability(p)
        traj = Trajectory(states[0], xi)
        for k, rho in enumerate(states[1:], start=1):
            traj.steps.append(TrajectoryStep(k, eta, rho, l2_distance(rho, xi)))
        out.append(traj)
    return out


def regimes_csv(p_grid: Sequence[float], trajectories: Sequence[Trajectory]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGIME_COLUMNS)
    for p, traj in zip(p_grid, trajectories):
        for row in traj.rows():
            w.writerow([fmt(p)] + row)
    return buf.getvalue()
