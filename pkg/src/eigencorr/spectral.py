"""Full symmetric eigendecomposition and mid-spectrum window selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .io import write_csv
from .models import HamiltonianPair

MAX_SWEEPS = 64


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues in ascending order; ``components[alpha, i] = <E_i^0|E_alpha>``."""

    energies: np.ndarray
    components: np.ndarray
    e0: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size


@dataclass(frozen=True)
class EnergyWindow:
    alpha_indices: np.ndarray
    d: float

    def __len__(self):
        return self.alpha_indices.size


# --- Jacobi rotations (small-matrix oracle) --------------------------------

def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi diagonalization; returns ``(eigenvalues, eigenvectors)``
    with eigenvectors in columns, sorted ascending.  Meant for dim <= 16."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                vp = c * v[:, p] - s * v[:, q]
                vq = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vp, vq
    else:
        raise EigensolverError("eigensolver failed to converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


# --- Householder tridiagonalization + implicit QL --------------------------

def householder_tridiagonalize(a):
    """Reduce symmetric ``a`` to tridiagonal form, ``q.T @ a @ q = T``.

    Returns ``(diag, offdiag, q)`` where ``offdiag[k] = T[k, k+1]``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        beta = -math.copysign(alpha, x[0])
        v = x.copy()
        v[0] -= beta
        v /= np.linalg.norm(v)
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = beta
        qs = q[:, k + 1:]
        qs -= 2.0 * np.outer(qs @ v, v)
    offdiag = np.zeros(n)
    offdiag[: n - 1] = np.diagonal(a, 1)
    return np.diagonal(a).copy(), offdiag, q


@numba.njit(cache=True)
def _tql_implicit(d, e, zt, max_iter):
    # zt holds eigenvector columns as rows; e[k] couples k and k+1, e[n-1] = 0
    n = d.size
    eps = np.finfo(np.float64).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = zt[i + 1, k]
                    zt[i + 1, k] = s * zt[i, k] + c * f
                    zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return True


def householder_ql_eigh(a, max_sweeps: int = MAX_SWEEPS):
    """Householder reduction followed by implicit-shift QL with eigenvector
    accumulation.  Returns ``(eigenvalues, eigenvectors)`` sorted ascending."""
    diag, off, q = householder_tridiagonalize(a)
    zt = np.ascontiguousarray(q.T)
    if not _tql_implicit(diag, off, zt, max_sweeps):
        raise EigensolverError("eigensolver failed to converge")
    order = np.argsort(diag, kind="stable")
    return diag[order], zt[order].T


def _lapack_eigh(a):
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError("eigensolver failed to converge") from exc


SOLVERS = {"lapack": _lapack_eigh, "householder": householder_ql_eigh, "jacobi": jacobi_eigh}


def fix_signs(vectors):
    """Flip each column so its largest-magnitude entry is positive."""
    vectors = np.array(vectors, dtype=float)
    if vectors.size == 0:
        return vectors
    pivot = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize(h: HamiltonianPair, method: str = "lapack") -> SpectralData:
    """Eigen-decompose ``diag(e0) + v``.

    ``method`` picks the dense solver: ``'lapack'`` (default), ``'householder'``
    (in-package Householder + QL) or ``'jacobi'`` (small matrices only).
    """
    if h.dim < 1:
        raise ValueError("empty Hamiltonian")
    try:
        solver = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown eigensolver {method!r}") from None
    w, vecs = solver(h.dense())
    comps = np.ascontiguousarray(fix_signs(vecs).T)
    for arr in (w, comps):
        arr.setflags(write=False)
    return SpectralData(np.asarray(w), comps, h.e0)


def select_window(s: SpectralData, count: int) -> EnergyWindow:
    """``count`` consecutive eigenstates centered on the middle of the spectrum."""
    if not 2 <= count <= s.dim:
        raise ValueError(f"window count must lie in [2, {s.dim}], got {count}")
    start = (s.dim - count) // 2
    idx = np.arange(start, start + count)
    d = (s.energies[idx[-1]] - s.energies[idx[0]]) / (count - 1)
    return EnergyWindow(idx, float(d))


def write_spectrum_csv(s: SpectralData, path: str | Path) -> Path:
    return write_csv(path, ["alpha", "E_alpha"], zip(range(s.dim), s.energies))
