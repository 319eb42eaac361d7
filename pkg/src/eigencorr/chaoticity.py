"""Level-statistics checks: consecutive-gap ratios and unfolded spacing histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial

from .io import write_csv
from .models import HamiltonianPair

# large-N GOE value; the 3x3 surmise gives 4 - 2*sqrt(3) = 0.536
GOE_MEAN_RATIO = 0.5307
POISSON_MEAN_RATIO = 2 * math.log(2) - 1


@dataclass(frozen=True)
class GapRatios:
    mean_ratio: float
    n_ratios: int
    n_skipped: int


@dataclass(frozen=True)
class SpacingReport:
    mean_ratio: float
    edges: np.ndarray
    density: np.ndarray
    goe_ref: float = GOE_MEAN_RATIO
    poisson_ref: float = POISSON_MEAN_RATIO

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def wigner_surmise(s):
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)


def poisson_spacing(s):
    return np.exp(-np.asarray(s, dtype=float))


def _windowed(energies, window):
    e = np.sort(np.asarray(energies, dtype=float))
    return e if window is None else e[np.asarray(window)]


def ratio_samples(energies, window=None):
    """Gap ratios ``min(s_a, s_a+1) / max(s_a, s_a+1)`` and the number skipped
    because both neighboring spacings vanish."""
    e = _windowed(energies, window)
    if e.size < 3:
        raise ValueError("need at least three levels")
    s = np.diff(e)
    lo, hi = np.minimum(s[:-1], s[1:]), np.maximum(s[:-1], s[1:])
    ok = hi > 0
    return lo[ok] / hi[ok], int((~ok).sum())


def gap_ratios(energies, window=None) -> GapRatios:
    r, skipped = ratio_samples(energies, window)
    mean = float(r.mean()) if r.size else float("nan")
    return GapRatios(mean, int(r.size), skipped)


def central_slice(n: int, fraction: float) -> np.ndarray:
    """Indices of the middle ``fraction`` of ``n`` sorted levels."""
    k = max(3, int(n * fraction))
    k = min(k, n)
    start = (n - k) // 2
    return np.arange(start, start + k)


def sector_spectra(h: HamiltonianPair, sectors) -> list:
    """Eigenvalues of each conserved-quantity block of ``H``."""
    dense = h.dense()
    sectors = np.asarray(sectors)
    return [np.linalg.eigvalsh(dense[np.ix_(sectors == k, sectors == k)]) for k in np.unique(sectors)]


def pooled_gap_ratio(spectra, fraction: float = 0.5) -> GapRatios:
    """Mean gap ratio pooled over the central ``fraction`` of every block."""
    rs, skipped = [], 0
    for e in spectra:
        if len(e) < 3:
            continue
        r, sk = ratio_samples(e, central_slice(len(e), fraction))
        rs.append(r)
        skipped += sk
    r = np.concatenate(rs) if rs else np.zeros(0)
    return GapRatios(float(r.mean()) if r.size else float("nan"), int(r.size), skipped)


def unfold(energies, window=None, poly_degree: int = 6, max_condition: float = 1e12):
    """Map levels through a polynomial fit of the staircase and return spacings
    rescaled to unit mean."""
    e = _windowed(energies, window)
    if e.size < 10:
        raise ValueError("need at least ten levels to unfold")
    stair = np.arange(1, e.size + 1, dtype=float)
    fit = Polynomial.fit(e, stair, poly_degree)
    off, scl = fit.mapparms()
    x = off + scl * e
    cond = np.linalg.cond(np.vander(x, poly_degree + 1))
    if not np.isfinite(cond) or cond > max_condition:
        raise ValueError(f"staircase fit is ill-conditioned (condition number {cond:.3g})")
    s = np.diff(fit(e))
    return s / s.mean()


def unfolded_spacings(energies, window=None, poly_degree: int = 6, n_bins: int = 30,
                      s_max: float | None = None):
    """Histogram density of unfolded spacings; returns ``(edges, density)``.

    The upper edge defaults to the largest spacing so the density integrates
    to one.
    """
    s = unfold(energies, window, poly_degree)
    top = s.max() * (1 + 1e-12) if s_max is None else max(s_max, s.max() * (1 + 1e-12))
    density, edges = np.histogram(s, bins=n_bins, range=(0.0, top), density=True)
    return edges, density


def spacing_report(spectra, fraction: float = 0.5, poly_degree: int = 6, n_bins: int = 30) -> SpacingReport:
    """Pooled report over symmetry blocks: each block is unfolded separately."""
    s_all = []
    for e in spectra:
        win = central_slice(len(e), fraction)
        if win.size >= 10:
            s_all.append(unfold(e, win, poly_degree))
    if not s_all:
        raise ValueError("no symmetry block has enough levels to unfold")
    s = np.concatenate(s_all)
    density, edges = np.histogram(s, bins=n_bins, range=(0.0, s.max() * (1 + 1e-12)), density=True)
    return SpacingReport(pooled_gap_ratio(spectra, fraction).mean_ratio, edges, density)


def write_spacings_csv(report: SpacingReport, path, summary_path) -> tuple:
    c = report.centers
    p1 = write_csv(path, ["s", "density", "wigner", "poisson"],
                   zip(c, report.density, wigner_surmise(c), poisson_spacing(c)))
    p2 = write_csv(summary_path, ["mean_ratio", "goe_ref", "poisson_ref"],
                   [[report.mean_ratio, report.goe_ref, report.poisson_ref]])
    return p1, p2
