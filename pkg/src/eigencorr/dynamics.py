"""Time evolution from basis states via the full spectral decomposition (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coupling import CouplingGraph
from .io import write_csv
from .spectral import EnergyWindow, SpectralData

TAU_SCALE = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    """Times as multiples of ``tau = 1e-3 / d``."""

    tau: float
    multiples: np.ndarray

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        m = np.asarray(self.multiples, dtype=float)
        if np.any(np.diff(m) < 0):
            raise ValueError("time points must be nondecreasing")
        object.__setattr__(self, "multiples", m)

    @property
    def times(self) -> np.ndarray:
        return self.multiples * self.tau

    @classmethod
    def from_window(cls, w: EnergyWindow, t_max_over_tau: float = 1000.0, steps: int = 1000) -> "TimeGrid":
        return cls(TAU_SCALE / w.d, np.linspace(0.0, t_max_over_tau, steps + 1))


@dataclass(frozen=True)
class DynamicsResult:
    initial_index: int
    times: np.ndarray
    f_i: np.ndarray
    survival: np.ndarray
    predicted: np.ndarray
    predicted_global: np.ndarray | None = None

    def relative_l2_error(self, mask=None) -> float:
        sel = slice(None) if mask is None else mask
        f, p = self.f_i[sel], self.predicted[sel]
        return float(np.linalg.norm(f - p) / np.linalg.norm(f))


def _phases(energies, times, sign=-1.0):
    return np.exp(sign * 1j * np.outer(np.asarray(times, float), energies))


def transition_amplitude(s: SpectralData, i: int, j: int, times) -> np.ndarray:
    """``F_ij(t) = sum_a exp(-i E_a t) C_aj C_ai``."""
    c = s.components
    return _phases(s.energies, times) @ (c[:, i] * c[:, j])


def transition_amplitudes(s: SpectralData, i: int, times, targets=None) -> np.ndarray:
    """``F_ij(t)`` for every ``j`` in ``targets`` (default: all), shape ``(T, len(targets))``."""
    c = s.components
    cols = c if targets is None else c[:, np.asarray(targets)]
    return _phases(s.energies, times) @ (c[:, i][:, None] * cols)


def _neighbors(g: CouplingGraph, i: int) -> np.ndarray:
    gi = g.neighbors[i]
    if gi.size == 0:
        raise ValueError("isolated initial state")
    return gi


def transition_probability(s: SpectralData, i: int, g: CouplingGraph, times) -> np.ndarray:
    """``F_i(t) = sum over j in g_i of |F_ij(t)|^2``."""
    amps = transition_amplitudes(s, i, times, _neighbors(g, i))
    return np.sum(np.abs(amps) ** 2, axis=1)


def survival(s: SpectralData, i: int, times):
    """Survival amplitude ``s_i(t) = sum_a |C_ai|^2 exp(i eps_ai t)`` with
    ``eps_ai = E_i^0 - E_a``, and its exact time derivative."""
    w = s.components[:, i] ** 2
    eps = s.e0[i] - s.energies
    ph = _phases(eps, times, sign=1.0)
    return ph @ w, 1j * (ph @ (eps * w))


def local_coupling(g: CouplingGraph, i: int):
    """``(N_i, mean V_ij over j in g_i)`` for basis state ``i``."""
    gi = _neighbors(g, i)
    sel = g.s1[:, 0] == i
    return gi.size, float(np.mean(g.s1_values[sel]))


def predict_transition(s: SpectralData, i: int, g: CouplingGraph, times,
                       n_bar: float | None = None, v_bar: float | None = None) -> np.ndarray:
    """``|d s_i/dt|^2 / (N V^2)``.

    Uses the coupling of state ``i`` itself unless ``n_bar`` and ``v_bar``
    are given.
    """
    n_loc, v_loc = local_coupling(g, i)
    n = n_loc if n_bar is None else n_bar
    v = v_loc if v_bar is None else v_bar
    if v == 0 or n == 0:
        raise ValueError("vanishing mean coupling of the initial state")
    _, ds = survival(s, i, times)
    return np.abs(ds) ** 2 / (n * v**2)


def pick_initial_state(e0, g: CouplingGraph) -> int:
    """Median-energy basis state among those with at least one coupling.

    States are ordered by ``(E_i^0, i)``; for an even count the lower middle
    one is taken.
    """
    e0 = np.asarray(e0)
    cand = np.flatnonzero(g.degree() > 0)
    if cand.size == 0:
        raise ValueError("isolated initial state")
    order = cand[np.lexsort((cand, e0[cand]))]
    return int(order[(order.size - 1) // 2])


def run_dynamics(s: SpectralData, i: int, g: CouplingGraph, grid: TimeGrid,
                 n_bar: float | None = None, v_bar: float | None = None) -> DynamicsResult:
    t = grid.times
    amp, _ = survival(s, i, t)
    glob = None
    if n_bar is not None and v_bar:
        glob = predict_transition(s, i, g, t, n_bar=n_bar, v_bar=v_bar)
    return DynamicsResult(
        initial_index=i,
        times=t,
        f_i=transition_probability(s, i, g, t),
        survival=amp,
        predicted=predict_transition(s, i, g, t),
        predicted_global=glob,
    )


def write_dynamics_csv(path, result: DynamicsResult, grid: TimeGrid) -> Path:
    header = ["t_over_tau", "F_i", "F_i_pred", "survival_prob"]
    cols = [grid.multiples, result.f_i, result.predicted, np.abs(result.survival) ** 2]
    if result.predicted_global is not None:
        header.append("F_i_pred_global")
        cols.append(result.predicted_global)
    return write_csv(path, header, zip(*cols))
