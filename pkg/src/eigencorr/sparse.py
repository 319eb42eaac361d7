"""Upper-triangle storage for real symmetric matrices with empty diagonal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

# entries below this fraction of the largest magnitude are treated as zero
DROP_TOLERANCE = 1e-14


@dataclass(frozen=True)
class SymmetricSparse:
    """Symmetric matrix stored as its strict upper triangle.

    ``rows[k] < cols[k]`` for every stored entry, ``values[k] != 0`` and each
    ``(row, col)`` pair appears once, sorted lexicographically.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if not (rows.shape == cols.shape == values.shape and rows.ndim == 1):
            raise ValueError("rows, cols and values must be 1-D arrays of equal length")
        if rows.size:
            if np.any(rows >= cols):
                raise ValueError("entries must lie strictly above the diagonal")
            if rows.min() < 0 or cols.max() >= self.dim:
                raise ValueError("entry index out of range")
            if np.any(values == 0):
                raise ValueError("stored values must be nonzero")
            keys = rows * self.dim + cols
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate entries")
            order = np.argsort(keys, kind="stable")
            rows, cols, values = rows[order], cols[order], values[order]
        for name, arr in (("rows", rows), ("cols", cols), ("values", values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def nnz_upper(self) -> int:
        return int(self.values.size)

    @classmethod
    def empty(cls, dim: int) -> "SymmetricSparse":
        return cls(dim, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))

    @classmethod
    def from_matrix(cls, mat, rtol: float = DROP_TOLERANCE, check_symmetry: bool = True) -> "SymmetricSparse":
        """Build from a full (dense or scipy) symmetric matrix with zero diagonal.

        Entries with ``|value| < rtol * max|value|`` are dropped.
        """
        m = sp.coo_matrix(mat)
        m.sum_duplicates()
        dim = m.shape[0]
        if m.shape != (dim, dim):
            raise ValueError("matrix must be square")
        if m.nnz == 0 or not np.any(m.data):
            return cls.empty(dim)
        cutoff = rtol * np.abs(m.data).max()
        keep = (np.abs(m.data) >= cutoff) & (m.data != 0)
        r, c, v = m.row[keep], m.col[keep], m.data[keep]
        if np.any(r == c):
            raise ValueError("perturbation has nonzero diagonal elements")
        upper = r < c
        if check_symmetry:
            ku = r[upper] * dim + c[upper]
            kl = c[~upper] * dim + r[~upper]
            ou, ol = np.argsort(ku), np.argsort(kl)
            if ku.size != kl.size or np.any(ku[ou] != kl[ol]):
                raise ValueError("matrix is not structurally symmetric")
            vu, vl = v[upper][ou], v[~upper][ol]
            if np.any(np.abs(vu - vl) > 1e-12 * np.abs(m.data).max()):
                raise ValueError("matrix is not symmetric")
        return cls(dim, r[upper], c[upper], v[upper])

    def to_scipy(self) -> sp.csr_matrix:
        """Full symmetric matrix in CSR form."""
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        v = np.concatenate([self.values, self.values])
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[self.rows, self.cols] = self.values
        out[self.cols, self.rows] = self.values
        return out

    def with_values(self, values) -> "SymmetricSparse":
        return SymmetricSparse(self.dim, self.rows, self.cols, values)


def randomize_signs(v: SymmetricSparse, fraction: float, seed: int) -> SymmetricSparse:
    """Flip the sign of ``round(fraction * nnz_upper)`` randomly chosen entries.

    The choice is a seeded permutation of the stored upper-triangle entries, so
    the same ``(v, fraction, seed)`` always yields the same matrix.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    n_flip = int(round(fraction * v.nnz_upper))
    if n_flip == 0:
        return v
    perm = np.random.default_rng(seed).permutation(v.nnz_upper)
    values = v.values.copy()
    values[perm[:n_flip]] *= -1.0
    return v.with_values(values)
