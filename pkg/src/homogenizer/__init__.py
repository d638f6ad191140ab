"""Dense-matrix simulator of Markovian and Fredkin-mediated non-Markovian
quantum homogenizers, with a Choi-state witness for quantum memory."""

from .channels import (QubitChannel, apply_gate, choi, fredkin, is_cptp, partial_swap)
from .dynamics import (CollisionPlan, EtaSchedule, Trajectory, evolve_composite, homogenize,
                       interpolation_sweep, operator_sum_evolution)
from .entanglement import (concurrence, concurrence_of_assistance, entanglement_of_formation,
                           eoa_search)
from .linalg import herm_eig, kron, l2_distance, partial_trace, sqrt_psd
from .states import ReservoirInit, ReservoirKind, build_reservoir, spin_flip, validate
from .witness import GapCurve, find_crossing, gap_curve, memory_gap, step1_channel, step2_channel

__version__ = "0.1.0"
