"""Coupling structure of a sparse perturbation: neighbor sets, first- and
second-step pair sets, and averaged coupling strengths."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .io import write_csv
from .sparse import SymmetricSparse


@dataclass(frozen=True)
class CouplingGraph:
    """Structural sets of a perturbation.

    ``s1`` holds ordered pairs ``(i, j)`` with a stored entry (both orders),
    ``s1_values`` the matching ``V_ij``.  ``s2_triples`` holds ordered
    ``(i, k, j)`` with ``V_ik V_kj != 0``, ``i != j`` and ``V_ij == 0``.
    """

    dim: int
    neighbors: tuple
    s1: np.ndarray
    s1_values: np.ndarray
    s2_triples: np.ndarray
    s2_weights: np.ndarray

    def degree(self) -> np.ndarray:
        return np.array([g.size for g in self.neighbors])


def build_graph(v: SymmetricSparse) -> CouplingGraph:
    dim = v.dim
    i = np.concatenate([v.rows, v.cols])
    j = np.concatenate([v.cols, v.rows])
    w = np.concatenate([v.values, v.values])
    order = np.lexsort((j, i))
    i, j, w = i[order], j[order], w[order]
    s1 = np.stack([i, j], axis=1) if i.size else np.zeros((0, 2), np.int64)
    starts = np.searchsorted(i, np.arange(dim + 1))
    neighbors = tuple(j[starts[k]:starts[k + 1]] for k in range(dim))
    weights = tuple(w[starts[k]:starts[k + 1]] for k in range(dim))

    s1_keys = i * dim + j  # sorted because of the lexsort above
    triples, prods = [], []
    for k in range(dim):
        g = neighbors[k]
        if g.size < 2:
            continue
        a, b = np.meshgrid(np.arange(g.size), np.arange(g.size), indexing="ij")
        mask = a != b
        a, b = a[mask], b[mask]
        gi, gj = g[a], g[b]
        keys = gi * dim + gj
        pos = np.searchsorted(s1_keys, keys)
        pos[pos == s1_keys.size] = 0
        keep = s1_keys[pos] != keys
        if np.any(keep):
            triples.append(np.stack([gi[keep], np.full(keep.sum(), k), gj[keep]], axis=1))
            prods.append(weights[k][a[keep]] * weights[k][b[keep]])
    if triples:
        s2 = np.concatenate(triples)
        s2w = np.concatenate(prods)
    else:
        s2 = np.zeros((0, 3), np.int64)
        s2w = np.zeros(0)
    return CouplingGraph(dim, neighbors, s1, w, s2, s2w)


def _mean(x) -> Optional[float]:
    return float(np.mean(x)) if len(x) else None


@dataclass(frozen=True)
class CouplingStats:
    """Global coupling averages; ``None`` marks a mean over an empty set."""

    n_bar: float
    v_bar: Optional[float]
    v2_bar: Optional[float]
    vabs_bar: Optional[float]
    w_bar: Optional[float]
    n_plus: float
    n_minus: float
    v_plus: Optional[float]
    v_minus: Optional[float]

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def compute_stats(v: SymmetricSparse, g: CouplingGraph) -> CouplingStats:
    vals = v.values
    dim = max(v.dim, 1)
    pos, neg = vals[vals > 0], vals[vals < 0]
    # each stored entry contributes a partner to both of its indices
    return CouplingStats(
        n_bar=2.0 * vals.size / dim,
        v_bar=_mean(vals),
        v2_bar=_mean(vals**2),
        vabs_bar=_mean(np.abs(vals)),
        w_bar=_mean(g.s2_weights),
        n_plus=2.0 * pos.size / dim,
        n_minus=2.0 * neg.size / dim,
        v_plus=_mean(pos),
        v_minus=_mean(neg),
    )


def write_stats_csv(stats: CouplingStats, path: str | Path) -> Path:
    d = stats.as_dict()
    return write_csv(path, list(d), [list(d.values())])
