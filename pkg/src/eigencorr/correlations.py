"""Energy-resolved averages of eigenfunction components.

All estimators sample over the eigenstates of an :class:`EnergyWindow` and bin
every sample at ``eps = E_l^0 - E_alpha`` for the label ``l`` named in each
function.  Absent bins (no samples, or no usable EF-shape normalization) carry
``nan`` in ``mean``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coupling import CouplingGraph, CouplingStats
from .io import write_csv
from .spectral import EnergyWindow, SpectralData

DEFAULT_BINS = 81
CENTRAL_FRACTION = 1e-2


class DegenerateStatsError(ValueError):
    pass


@dataclass(frozen=True)
class BinGrid:
    eps_min: float
    eps_max: float
    n_bins: int = DEFAULT_BINS

    def __post_init__(self):
        if not self.eps_min < self.eps_max:
            raise ValueError("eps_min must be smaller than eps_max")
        if int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise ValueError("n_bins must be a positive integer")

    @property
    def width(self) -> float:
        return (self.eps_max - self.eps_min) / self.n_bins

    @property
    def centers(self) -> np.ndarray:
        return self.eps_min + (np.arange(self.n_bins) + 0.5) * self.width

    def index(self, eps) -> np.ndarray:
        """Bin index of each value, -1 outside ``[eps_min, eps_max]``."""
        eps = np.asarray(eps, dtype=float)
        idx = np.floor((eps - self.eps_min) / self.width).astype(np.int64)
        idx[eps == self.eps_max] = self.n_bins - 1
        idx[(idx < 0) | (idx >= self.n_bins)] = -1
        return idx


@dataclass(frozen=True)
class BinnedStatistic:
    centers: np.ndarray
    mean: np.ndarray
    count: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return np.isfinite(self.mean)

    def at(self, eps: float) -> float:
        """Value of the bin whose center is closest to ``eps``."""
        return float(self.mean[np.argmin(np.abs(self.centers - eps))])


def auto_grid(s: SpectralData, w: EnergyWindow, n_bins: int = DEFAULT_BINS) -> BinGrid:
    """Symmetric grid covering every ``E_i^0 - E_alpha`` of the window."""
    e = s.energies[w.alpha_indices]
    half = max(abs(s.e0.max() - e.min()), abs(s.e0.min() - e.max()))
    half = half * (1 + 1e-9) if half > 0 else 1.0
    return BinGrid(-half, half, n_bins)


def _accumulate(grid: BinGrid, eps, values):
    idx = grid.index(np.ravel(eps))
    vals = np.broadcast_to(values, np.shape(eps)).ravel()
    keep = idx >= 0
    sums = np.bincount(idx[keep], weights=vals[keep], minlength=grid.n_bins)
    counts = np.bincount(idx[keep], minlength=grid.n_bins)
    return sums, counts


def _binned(grid, sums, counts) -> BinnedStatistic:
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return BinnedStatistic(grid.centers, mean, counts)


def _normalized(grid, sums, counts, pi: BinnedStatistic) -> BinnedStatistic:
    raw = _binned(grid, sums, counts)
    ok = raw.present & pi.present & (pi.mean > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(ok, raw.mean / np.where(ok, pi.mean, 1.0), np.nan)
    return BinnedStatistic(grid.centers, mean, counts)


def _window_parts(s: SpectralData, w: EnergyWindow):
    c = s.components[w.alpha_indices]
    e = s.energies[w.alpha_indices]
    return c, e


def ef_shape(s: SpectralData, w: EnergyWindow, grid: BinGrid) -> BinnedStatistic:
    """Averaged EF shape: mean of ``|C_ai|^2`` at ``eps = E_i^0 - E_a``."""
    if len(w) == 0:
        raise ValueError("window is empty")
    c, e = _window_parts(s, w)
    eps = s.e0[None, :] - e[:, None]
    return _binned(grid, *_accumulate(grid, eps, c**2))


def _pair_samples(s, w, i, j):
    c, e = _window_parts(s, w)
    return s.e0[i][None, :] - e[:, None], c[:, i] * c[:, j]


def _require_s1(g: CouplingGraph):
    if g.s1.shape[0] == 0:
        raise ValueError("perturbation has no directly coupled pairs")


def corr1(s: SpectralData, w: EnergyWindow, g: CouplingGraph, grid: BinGrid,
          pi: BinnedStatistic | None = None) -> BinnedStatistic:
    """First-order correlation: mean ``C_ai C_aj`` over coupled pairs, binned
    at ``eps = E_i^0 - E_a`` and divided by the EF shape."""
    _require_s1(g)
    pi = ef_shape(s, w, grid) if pi is None else pi
    eps, cc = _pair_samples(s, w, g.s1[:, 0], g.s1[:, 1])
    return _normalized(grid, *_accumulate(grid, eps, cc), pi)


def corr2(s: SpectralData, w: EnergyWindow, g: CouplingGraph, grid: BinGrid,
          pi: BinnedStatistic | None = None):
    """Second-order correlation over ``(i, k, j)`` triples, binned at the
    intermediate ``eps = E_k^0 - E_a``.

    Returns ``(c2, pi_d, eta)``: the normalized mean of ``C_ai C_aj``, the
    conditioned shape ``<|C_ai|^2>'`` and their ratio ``eta = pi_d / pi``.
    With no second-step triples all three are empty (every bin absent).
    """
    pi = ef_shape(s, w, grid) if pi is None else pi
    t = g.s2_triples
    if t.shape[0] == 0:
        empty = np.zeros(grid.n_bins)
        none = _binned(grid, empty, empty.astype(np.int64))
        return none, none, none
    c, e = _window_parts(s, w)
    eps = s.e0[t[:, 1]][None, :] - e[:, None]
    ci = c[:, t[:, 0]]
    c2 = _normalized(grid, *_accumulate(grid, eps, ci * c[:, t[:, 2]]), pi)
    sums_d, counts_d = _accumulate(grid, eps, ci**2)
    pi_d = _binned(grid, sums_d, counts_d)
    eta = _normalized(grid, sums_d, counts_d, pi)
    return c2, pi_d, eta


def corr1_signed(s: SpectralData, w: EnergyWindow, g: CouplingGraph, grid: BinGrid,
                 pi: BinnedStatistic | None = None):
    """Sign-resolved first-order correlations.

    Returns ``(c1_plus, c1_minus, c1_weighted)``: restricted to positive or
    negative ``V_ij``, and weighted by ``sign(V_ij)`` over all coupled pairs.
    """
    _require_s1(g)
    pi = ef_shape(s, w, grid) if pi is None else pi
    eps, cc = _pair_samples(s, w, g.s1[:, 0], g.s1[:, 1])
    sign = np.sign(g.s1_values)
    out = []
    for mask in (sign > 0, sign < 0):
        out.append(_normalized(grid, *_accumulate(grid, eps[:, mask], cc[:, mask]), pi))
    out.append(_normalized(grid, *_accumulate(grid, eps, cc * sign[None, :]), pi))
    return tuple(out)


def corr_sign(s: SpectralData, w: EnergyWindow, g: CouplingGraph, grid: BinGrid) -> BinnedStatistic:
    """Mean of ``sign(C_ai C_aj) * sign(V_ij)`` over coupled pairs."""
    _require_s1(g)
    eps, cc = _pair_samples(s, w, g.s1[:, 0], g.s1[:, 1])
    vals = np.sign(cc) * np.sign(g.s1_values)[None, :]
    return _binned(grid, *_accumulate(grid, eps, vals))


def corr_all_pairs(s: SpectralData, w: EnergyWindow, grid: BinGrid, sample_cap: int | None = 200_000,
                   seed: int = 0, pi: BinnedStatistic | None = None) -> BinnedStatistic:
    """Normalized ``C_ai C_aj`` over ordered pairs ``i != j`` regardless of coupling.

    If the number of ordered pairs exceeds ``sample_cap``, a seeded uniform
    subset of that size (without replacement) is used for every eigenstate.
    ``sample_cap=None`` enumerates every pair.
    """
    dim = s.dim
    if dim < 2:
        raise ValueError("need at least two basis states")
    pi = ef_shape(s, w, grid) if pi is None else pi
    total = dim * (dim - 1)
    if sample_cap is None or sample_cap >= total:
        flat = np.arange(total)
    else:
        flat = np.sort(np.random.default_rng(seed).choice(total, size=sample_cap, replace=False))
    i = flat // (dim - 1)
    j = flat % (dim - 1)
    j = j + (j >= i)  # skip the diagonal
    sums = np.zeros(grid.n_bins)
    counts = np.zeros(grid.n_bins, dtype=np.int64)
    chunk = 50_000
    for lo in range(0, i.size, chunk):
        eps, cc = _pair_samples(s, w, i[lo:lo + chunk], j[lo:lo + chunk])
        su, co = _accumulate(grid, eps, cc)
        sums += su
        counts += co
    return _normalized(grid, sums, counts, pi)


def local_coupling(s: SpectralData, w: EnergyWindow, g: CouplingGraph, grid: BinGrid) -> dict:
    """Coupling averages conditioned on ``eps = E_i^0 - E_a``.

    ``n_bar`` averages ``|g_i|`` over the same samples as the EF shape;
    ``v_bar`` and ``vabs_bar`` average ``V_ij`` and ``|V_ij|`` over the same
    samples as :func:`corr1`.
    """
    _, e = _window_parts(s, w)
    eps = s.e0[None, :] - e[:, None]
    n_bar = _binned(grid, *_accumulate(grid, eps, g.degree()[None, :].astype(float)))
    eps_p = s.e0[g.s1[:, 0]][None, :] - e[:, None]
    v = g.s1_values[None, :]
    return {
        "n_bar": n_bar,
        "v_bar": _binned(grid, *_accumulate(grid, eps_p, v)),
        "vabs_bar": _binned(grid, *_accumulate(grid, eps_p, np.abs(v))),
    }


def predict_c1_local(local: dict, grid: BinGrid, weighted: bool = False) -> BinnedStatistic:
    """``-eps / (V_bar(eps) N_bar(eps))`` with the eps-conditioned averages."""
    v = local["vabs_bar" if weighted else "v_bar"].mean
    denom = v * local["n_bar"].mean
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(np.isfinite(denom) & (denom != 0), -grid.centers / denom, np.nan)
    return _prediction(grid, vals)


def _prediction(grid, values) -> BinnedStatistic:
    # analytic curves: one evaluation per bin
    values = np.asarray(values, dtype=float)
    return BinnedStatistic(grid.centers, values, np.isfinite(values).astype(np.int64))


def predict_c1(stats: CouplingStats, grid: BinGrid) -> BinnedStatistic:
    """``-eps / (V_bar * N_bar)``."""
    denom = (stats.v_bar or 0.0) * stats.n_bar
    if denom == 0:
        raise DegenerateStatsError("degenerate coupling statistics")
    return _prediction(grid, -grid.centers / denom)


def predict_c1_weighted(stats: CouplingStats, grid: BinGrid) -> BinnedStatistic:
    """``-eps / (|V|_bar * N_bar)``, the sign-weighted counterpart."""
    denom = (stats.vabs_bar or 0.0) * stats.n_bar
    if denom == 0:
        raise DegenerateStatsError("degenerate coupling statistics")
    return _prediction(grid, -grid.centers / denom)


def predict_c2(stats: CouplingStats, eta: BinnedStatistic | float, grid: BinGrid) -> BinnedStatistic:
    """``(eps^2 - V2_bar N_bar eta) / (W_bar N_bar (N_bar - 1))`` per bin.

    ``eta`` may be a binned statistic (bins where it is absent stay absent) or
    a scalar applied to every bin.
    """
    n = stats.n_bar
    if n <= 1 or not stats.w_bar:
        raise DegenerateStatsError("degenerate coupling statistics")
    eta_vals = eta.mean if isinstance(eta, BinnedStatistic) else np.full(grid.n_bins, float(eta))
    eps = grid.centers
    return _prediction(grid, (eps**2 - stats.v2_bar * n * eta_vals) / (stats.w_bar * n * (n - 1)))


def central_bins(pi: BinnedStatistic, fraction: float = CENTRAL_FRACTION) -> np.ndarray:
    """Bins where the EF shape is at least ``fraction`` of its maximum."""
    vals = np.where(pi.present, pi.mean, -np.inf)
    return vals >= fraction * np.nanmax(pi.mean)


def fit_polynomial(stat: BinnedStatistic, mask, degree: int) -> np.ndarray:
    """Least-squares polynomial coefficients (highest power first) over the
    present bins selected by ``mask``."""
    sel = np.asarray(mask) & stat.present
    if sel.sum() <= degree:
        raise ValueError("not enough bins for the fit")
    return np.polyfit(stat.centers[sel], stat.mean[sel], degree)


def write_binned_csv(path, stat: BinnedStatistic, prediction: BinnedStatistic | None = None) -> Path:
    header = ["eps_center", "value", "count"]
    cols = [stat.centers, stat.mean, stat.count]
    if prediction is not None:
        header.append("prediction")
        cols.append(prediction.mean)
    return write_csv(path, header, zip(*cols))
