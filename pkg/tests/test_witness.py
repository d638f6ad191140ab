import csv
import io
import json

import numpy as np
import pytest

from homogenizer.channels import choi, fredkin, identity_choi, is_cptp, partial_swap
from homogenizer.errors import PreconditionError
from homogenizer.states import ReservoirInit, bloch_state, build_reservoir, pure, validate
from homogenizer.witness import (GapCurve, GapSample, default_grid, find_crossing, gap_curve,
                                 memory_gap, reservoir_after_step1, step1_channel, step2_channel)

from oracles import dense_gate, kron_loops, partial_trace_loops, random_state

INITS = [ReservoirInit("bell"), ReservoirInit("ghz"), ReservoirInit("asym_ghz"),
         ReservoirInit("x_error_ghz"), ReservoirInit("perturbed_ghz", alpha=0.3),
         ReservoirInit("product", xi=(0.1, -0.3, 0.6))]


@pytest.mark.parametrize("init", INITS, ids=lambda i: i.label)
def test_zero_coupling_is_identity(init, rng):
    rho = random_state(rng, 2)
    np.testing.assert_allclose(step1_channel(init, 0.0)(rho), rho, atol=1e-14)
    np.testing.assert_allclose(step2_channel(init, 0.0)(rho), rho, atol=1e-14)
    np.testing.assert_allclose(choi(step1_channel(init, 0.0)), identity_choi(), atol=1e-14)
    assert abs(memory_gap(init, 0.0).gap) < 1e-9


def test_product_full_swap_outputs_xi(rng):
    init = ReservoirInit("product", xi=(0.0, 0.0, 1.0))
    for ch in (step1_channel(init, np.pi / 2), step2_channel(init, np.pi / 2)):
        np.testing.assert_allclose(ch(random_state(rng, 2)), pure([1, 0]), atol=1e-15)


def _step1_oracle(rho, init, eta):
    u = dense_gate(fredkin(), (1, 2, 3), 4) @ dense_gate(partial_swap(eta), (0, 1), 4)
    joint = kron_loops(rho, build_reservoir(init))
    return partial_trace_loops(u @ joint @ u.conj().T, [0], 4)


@pytest.mark.parametrize("init", INITS[:5], ids=lambda i: i.label)
def test_step1_matches_full_unitary_oracle(init, rng):
    for eta in (0.3, 1.0, 1.4):
        rho = random_state(rng, 2)
        np.testing.assert_allclose(step1_channel(init, eta)(rho), _step1_oracle(rho, init, eta),
                                   atol=1e-13)


def test_product_step2_equals_step1(rng):
    init = ReservoirInit("product", xi=(0.4, 0.0, -0.3))
    for eta in (0.2, 0.9):
        np.testing.assert_allclose(choi(step1_channel(init, eta)), choi(step2_channel(init, eta)),
                                   atol=1e-14)
        assert memory_gap(init, eta).c_form <= memory_gap(init, eta).c_assist + 1e-12


def test_reservoir_after_step1_is_a_state():
    sigma = reservoir_after_step1(ReservoirInit("ghz"), 0.7)
    assert sigma.shape == (8, 8)
    assert validate(sigma).passed


def test_witness_needs_three_ancillas():
    with pytest.raises(PreconditionError):
        step1_channel(ReservoirInit("bell", n_qubits=2), 0.3)


@pytest.mark.parametrize("init", INITS, ids=lambda i: i.label)
def test_channels_are_cptp_and_gap_is_continuous(init):
    grid = np.linspace(0, np.pi / 2, 13)
    gaps = []
    for eta in grid:
        assert is_cptp(step1_channel(init, eta)).passed
        assert is_cptp(step2_channel(init, eta)).passed
        gaps.append(memory_gap(init, eta).gap)
    fine = [memory_gap(init, 0.6 + d).gap for d in (0.0, 1e-6)]
    assert abs(fine[1] - fine[0]) < 1e-4
    assert all(-1.0 - 1e-12 <= g <= 1.0 + 1e-12 for g in gaps)


def _synthetic(etas, fn):
    return GapCurve(ReservoirInit("ghz"), [GapSample(e, fn(e), 0.0) for e in etas])


def test_find_crossing_on_synthetic_gap():
    def fn(e):
        return 1.0 - e
    curve = _synthetic(default_grid(60), fn)
    eta_star = find_crossing(curve, gap_fn=fn)
    assert abs(eta_star - 1.0) <= 1e-4


def test_find_crossing_leaving_negative_region():
    def fn(e):
        return e - 0.5
    assert abs(find_crossing(_synthetic(default_grid(20), fn), gap_fn=fn) - 0.5) <= 1e-4


def test_find_crossing_none_and_errors():
    def fn(e):
        return 0.1 + e
    assert find_crossing(_synthetic(default_grid(10), fn), gap_fn=fn) is None
    with pytest.raises(PreconditionError):
        find_crossing(_synthetic([0.3], fn), gap_fn=fn)


def test_gap_curve_single_point_and_grid_checks():
    curve = gap_curve(ReservoirInit("ghz"), [0.5])
    assert len(curve.samples) == 1 and curve.crossing is None
    with pytest.raises(PreconditionError):
        gap_curve(ReservoirInit("ghz"), [0.5, 0.4])
    with pytest.raises(PreconditionError):
        gap_curve(ReservoirInit("ghz"), [0.5, 2.0])


def test_gap_curve_outputs():
    curve = gap_curve(ReservoirInit("asym_ghz"), default_grid(5), bloch_state((0, 0, 0)))
    rows = list(csv.reader(io.StringIO(curve.to_csv())))
    assert rows[0] == ["eta", "c_assist_step1", "c_form_step2", "gap"]
    assert len(rows) == 6
    for r, s in zip(rows[1:], curve.samples):
        assert float(r[0]) == s.eta and float(r[3]) == s.gap
    summary = json.loads(curve.summary_json())
    assert summary == {"init": "asym_ghz", "eta_star": curve.crossing}
