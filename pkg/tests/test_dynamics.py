import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigencorr import dynamics as dyn
from eigencorr.coupling import build_graph, compute_stats
from eigencorr.models import DefectXXZ, HamiltonianPair, build_model
from eigencorr.sparse import SymmetricSparse
from eigencorr.spectral import SpectralData, diagonalize, select_window
from oracles import rabi


def _two_level(delta, v):
    h = HamiltonianPair(np.array([0.0, delta]), SymmetricSparse.from_matrix(np.array([[0, v], [v, 0]])))
    return h, diagonalize(h), build_graph(h.v)


def _small_xxz():
    _, h = build_model(DefectXXZ(n_sites=8, sz_sector=-1.0))
    return h, diagonalize(h), build_graph(h.v)


def test_rabi_oracle():
    delta, v = 0.8, 0.3
    _, s, g = _two_level(delta, v)
    t = np.linspace(0, 60, 1000)
    prob, amp = rabi(delta, v, t)
    np.testing.assert_allclose(dyn.transition_probability(s, 0, g, t), prob, atol=1e-12)
    surv, _ = dyn.survival(s, 0, t)
    np.testing.assert_allclose(surv, amp, atol=1e-12)
    np.testing.assert_allclose(dyn.predict_transition(s, 0, g, t), prob, atol=1e-12)


def test_initial_values():
    _, s, g = _small_xxz()
    t = np.array([0.0, 0.1])
    i = dyn.pick_initial_state(s.e0, g)
    assert dyn.transition_probability(s, i, g, t)[0] == pytest.approx(0.0, abs=1e-13)
    amp, deriv = dyn.survival(s, i, t)
    assert amp[0] == pytest.approx(1.0, abs=1e-13)
    assert dyn.predict_transition(s, i, g, t)[0] == pytest.approx(0.0, abs=1e-20)
    np.testing.assert_allclose(dyn.transition_amplitudes(s, i, [0.0])[0], np.eye(s.dim)[i], atol=1e-13)


def test_unitarity():
    _, s, g = _small_xxz()
    t = np.linspace(0, 40, 200)
    amps = dyn.transition_amplitudes(s, 3, t)
    np.testing.assert_allclose(np.sum(np.abs(amps) ** 2, axis=1), 1.0, atol=1e-12)
    # survival is the diagonal amplitude up to the E_i^0 phase
    surv, _ = dyn.survival(s, 3, t)
    np.testing.assert_allclose(surv, np.exp(1j * s.e0[3] * t) * amps[:, 3], atol=1e-12)


def test_time_reversal_symmetry():
    _, s, g = _small_xxz()
    t = np.linspace(0, 10, 50)
    f = dyn.transition_amplitude(s, 2, 5, t)
    b = dyn.transition_amplitude(s, 2, 5, -t)
    np.testing.assert_allclose(f, np.conj(b), atol=1e-13)
    np.testing.assert_allclose(f, dyn.transition_amplitude(s, 5, 2, t), atol=1e-13)


@given(st.floats(0.0, 30.0))
@settings(max_examples=25, deadline=None)
def test_derivative_matches_finite_difference(t):
    _, s, _ = _small_xxz()
    h = 1e-5
    amps, deriv = dyn.survival(s, 4, np.array([t - h, t, t + h]))
    assert deriv[1] == pytest.approx((amps[2] - amps[0]) / (2 * h), abs=1e-7)


def test_energy_shift_invariance():
    h, s, g = _small_xxz()
    shift = 3.7
    moved = SpectralData(s.energies + shift, s.components, s.e0 + shift)
    t = np.linspace(0, 20, 64)
    np.testing.assert_allclose(dyn.transition_probability(moved, 1, g, t),
                               dyn.transition_probability(s, 1, g, t), atol=1e-12)
    np.testing.assert_allclose(dyn.predict_transition(moved, 1, g, t),
                               dyn.predict_transition(s, 1, g, t), atol=1e-12)


def test_local_versus_global_statistics():
    h, s, g = _small_xxz()
    t = np.linspace(0, 5, 11)
    stats = compute_stats(h.v, g)
    i = 0
    n_i, v_i = dyn.local_coupling(g, i)
    assert n_i == len(g.neighbors[i]) and v_i == pytest.approx(2.8)
    glob = dyn.predict_transition(s, i, g, t, n_bar=stats.n_bar, v_bar=stats.v_bar)
    loc = dyn.predict_transition(s, i, g, t)
    np.testing.assert_allclose(glob * stats.n_bar, loc * n_i, rtol=1e-12)


def test_pick_initial_state():
    v = SymmetricSparse.from_matrix(np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], float))
    g = build_graph(v)
    assert dyn.pick_initial_state(np.array([3.0, 1.0, 2.0, 0.0]), g) == 1
    lone = build_graph(SymmetricSparse.from_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], float)))
    # state 2 is isolated and never picked
    assert dyn.pick_initial_state(np.array([0.0, 2.0, 1.0]), lone) == 0
    with pytest.raises(ValueError, match="isolated"):
        dyn.transition_probability(None, 2, lone, [0.0])


def test_time_grid_and_csv(tmp_path):
    _, s, g = _small_xxz()
    w = select_window(s, 10)
    grid = dyn.TimeGrid.from_window(w, 10.0, 5)
    assert grid.tau == pytest.approx(1e-3 / w.d)
    np.testing.assert_allclose(grid.times, np.linspace(0, 10, 6) * grid.tau)
    res = dyn.run_dynamics(s, 0, g, grid, 2.0, 2.8)
    path = dyn.write_dynamics_csv(tmp_path / "d.csv", res, grid)
    lines = path.read_text().splitlines()
    assert lines[0] == "t_over_tau,F_i,F_i_pred,survival_prob,F_i_pred_global"
    assert len(lines) == 7
    with pytest.raises(ValueError):
        dyn.TimeGrid(0.0, np.zeros(2))
