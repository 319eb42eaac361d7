"""Unperturbed spectra and sparse perturbations for the four model Hamiltonians.

Every builder returns a :class:`BasisCatalog` and a :class:`HamiltonianPair`
with ``H = diag(e0) + v``.  Basis states are listed in lexicographic order of
their label tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

from .sparse import SymmetricSparse


@dataclass(frozen=True)
class LMG:
    """Three-level Lipkin-Meshkov-Glick model, collective (fully symmetric) space."""

    omega: int = 40
    eps1: float = 1.10
    eps2: float = 1.61
    mu1: float = 0.031
    mu2: float = 0.035
    mu3: float = 0.038
    mu4: float = 0.033

    def __post_init__(self):
        if int(self.omega) != self.omega or self.omega < 1:
            raise ValueError("omega (particle count) must be an integer >= 1")


@dataclass(frozen=True)
class Dicke:
    """Single-mode Dicke model with the boson number truncated at ``n_max``."""

    n_atoms: int = 40
    omega0: float = 1.0
    omega: float = 1.0
    lam: float = 1.0
    n_max: int = 40

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError("n_atoms must be an integer >= 1")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be an integer >= 1")


def _check_defect_sites(n_sites, sites):
    if int(n_sites) != n_sites or n_sites < 2:
        raise ValueError("n_sites must be an integer >= 2")
    if len(sites) != 2 or any(int(s) != s or not 1 <= s <= n_sites for s in sites):
        raise ValueError(f"defect_sites must be two site numbers in 1..{n_sites}")


@dataclass(frozen=True)
class DefectXXZ:
    """Open XXZ chain with two local z-fields, restricted to one S_z sector.

    ``sz_convention='half'`` reads the sector as the eigenvalue of
    ``sum(sigma_z) / 2``; ``'pauli'`` reads it as the eigenvalue of ``sum(sigma_z)``.
    Defect sites are 1-based.
    """

    n_sites: int = 12
    j_flip: float = 1.4
    mu_zz: float = 0.5
    mu1: float = 1.11
    mu4: float = 1.11
    sz_sector: float = -2.0
    sz_convention: str = "half"
    defect_sites: tuple = (1, 4)

    def __post_init__(self):
        _check_defect_sites(self.n_sites, self.defect_sites)
        if self.sz_convention not in ("half", "pauli"):
            raise ValueError("sz_convention must be 'half' or 'pauli'")
        n_up = self.n_up
        if n_up != int(n_up) or not 0 <= n_up <= self.n_sites:
            raise ValueError(
                f"sz_sector={self.sz_sector} is not an allowed S_z value for {self.n_sites} spins"
            )

    @property
    def n_up(self) -> float:
        total = 2 * self.sz_sector if self.sz_convention == "half" else self.sz_sector
        return (self.n_sites + total) / 2


@dataclass(frozen=True)
class DefectIsing:
    """Transverse-field Ising chain with two local z-fields.

    ``boundary`` sets the zz bond sum (``'periodic'`` adds the bond N-1).  The
    transverse field acts on sites 1..N-1 unless ``field_all_sites`` is set.
    """

    n_sites: int = 10
    jz: float = 1.0
    lambda_x: float = 0.45
    mu1: float = 1.11
    mu4: float = 1.11
    boundary: str = "periodic"
    field_all_sites: bool = False
    defect_sites: tuple = (1, 4)

    def __post_init__(self):
        _check_defect_sites(self.n_sites, self.defect_sites)
        if self.boundary not in ("open", "periodic"):
            raise ValueError("boundary must be 'open' or 'periodic'")


ModelSpec = Union[LMG, Dicke, DefectXXZ, DefectIsing]

MODEL_NAMES = {"lmg": LMG, "dicke": Dicke, "defect_xxz": DefectXXZ, "defect_ising": DefectIsing}


@dataclass(frozen=True)
class BasisCatalog:
    fields: tuple
    labels: tuple

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._lookup[tuple(label)]

    @property
    def _lookup(self):
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {lab: k for k, lab in enumerate(self.labels)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache


@dataclass(frozen=True)
class HamiltonianPair:
    e0: np.ndarray
    v: SymmetricSparse

    def __post_init__(self):
        e0 = np.asarray(self.e0, dtype=float)
        if e0.shape != (self.v.dim,):
            raise ValueError("e0 length must match the perturbation dimension")
        e0.setflags(write=False)
        object.__setattr__(self, "e0", e0)

    @property
    def dim(self) -> int:
        return self.v.dim

    def dense(self) -> np.ndarray:
        return np.diag(self.e0) + self.v.to_dense()


def _assemble(dim, rows, cols, vals) -> SymmetricSparse:
    if not rows:
        return SymmetricSparse.empty(dim)
    mat = sp.coo_matrix((np.asarray(vals, float), (rows, cols)), shape=(dim, dim))
    return SymmetricSparse.from_matrix(mat)


# --- LMG -----------------------------------------------------------------

# V^(t) as sums of products K_a K_b, K_rs = a_r^+ a_s; the rightmost factor acts first
_LMG_TERMS = (
    (((1, 0), (1, 0)), ((0, 1), (0, 1))),
    (((2, 0), (2, 0)), ((0, 2), (0, 2))),
    (((2, 1), (2, 0)), ((0, 2), (1, 2))),
    (((1, 2), (1, 0)), ((0, 1), (2, 1))),
)


def _apply_k(occ, r, s):
    """K_rs on an occupation tuple; returns (new_occ, amplitude) or None."""
    if occ[s] == 0:
        return None
    new = list(occ)
    amp = math.sqrt(new[s])
    new[s] -= 1
    new[r] += 1
    amp *= math.sqrt(new[r])
    return tuple(new), amp


def build_lmg(spec: LMG):
    omega = int(spec.omega)
    labels = tuple(
        (n0, n1, omega - n0 - n1) for n0 in range(omega + 1) for n1 in range(omega - n0 + 1)
    )
    basis = BasisCatalog(("n0", "n1", "n2"), labels)
    e0 = np.array([spec.eps1 * n1 + spec.eps2 * n2 for _, n1, n2 in labels])
    mus = (spec.mu1, spec.mu2, spec.mu3, spec.mu4)
    rows, cols, vals = [], [], []
    for col, occ in enumerate(labels):
        for mu, products in zip(mus, _LMG_TERMS):
            if mu == 0:
                continue
            for product in products:
                state, amp = occ, mu
                for r, s in reversed(product):
                    hit = _apply_k(state, r, s)
                    if hit is None:
                        break
                    state, a = hit
                    amp *= a
                else:
                    rows.append(basis.index(state))
                    cols.append(col)
                    vals.append(amp)
    return basis, HamiltonianPair(e0, _assemble(basis.dim, rows, cols, vals))


# --- Dicke ---------------------------------------------------------------

def build_dicke(spec: Dicke):
    n_atoms, n_max = int(spec.n_atoms), int(spec.n_max)
    j = n_atoms / 2
    n_m = n_atoms + 1
    ms = [-j + k for k in range(n_m)]
    labels = tuple((n, m) for n in range(n_max + 1) for m in ms)
    basis = BasisCatalog(("n", "m"), labels)
    e0 = np.array([spec.omega0 * m + spec.omega * n for n, m in labels])
    g = spec.lam / math.sqrt(n_atoms)
    rows, cols, vals = [], [], []
    if g != 0:
        for col, (n, m) in enumerate(labels):
            km = col % n_m
            for dn in (-1, 1):
                n2 = n + dn
                if not 0 <= n2 <= n_max:
                    continue
                boson = math.sqrt(max(n, n2))
                for dm in (-1, 1):
                    if not 0 <= km + dm < n_m:
                        continue
                    spin = math.sqrt(j * (j + 1) - m * (m + dm))
                    rows.append(n2 * n_m + km + dm)
                    cols.append(col)
                    vals.append(g * boson * spin)
    return basis, HamiltonianPair(e0, _assemble(basis.dim, rows, cols, vals))


# --- spin chains ---------------------------------------------------------

def _defect_energy(bits, spec, bonds, coupling):
    sz = 2 * np.asarray(bits) - 1
    a, b = (s - 1 for s in spec.defect_sites)
    energy = spec.mu1 * sz[a] + spec.mu4 * sz[b]
    for p, q in bonds:
        energy += coupling * sz[p] * sz[q]
    return float(energy)


def build_defect_xxz(spec: DefectXXZ):
    n = int(spec.n_sites)
    n_up = int(spec.n_up)
    labels = tuple(c for c in itertools.product((0, 1), repeat=n) if sum(c) == n_up)
    if not labels:
        raise ValueError("empty symmetry sector")
    basis = BasisCatalog(tuple(f"s{k + 1}" for k in range(n)), labels)
    bonds = [(k, k + 1) for k in range(n - 1)]
    e0 = np.array([_defect_energy(c, spec, bonds, spec.mu_zz) for c in labels])
    rows, cols, vals = [], [], []
    if spec.j_flip != 0:
        for col, c in enumerate(labels):
            for p, q in bonds:
                if c[p] != c[q]:
                    swapped = list(c)
                    swapped[p], swapped[q] = c[q], c[p]
                    rows.append(basis.index(tuple(swapped)))
                    cols.append(col)
                    vals.append(2.0 * spec.j_flip)
    return basis, HamiltonianPair(e0, _assemble(basis.dim, rows, cols, vals))


def build_defect_ising(spec: DefectIsing):
    n = int(spec.n_sites)
    labels = tuple(itertools.product((0, 1), repeat=n))
    basis = BasisCatalog(tuple(f"s{k + 1}" for k in range(n)), labels)
    bonds = [(k, k + 1) for k in range(n - 1)]
    if spec.boundary == "periodic" and n > 2:
        bonds.append((n - 1, 0))
    e0 = np.array([_defect_energy(c, spec, bonds, spec.jz) for c in labels])
    field_sites = range(n if spec.field_all_sites else n - 1)
    rows, cols, vals = [], [], []
    if spec.lambda_x != 0:
        for col, c in enumerate(labels):
            for k in field_sites:
                # lexicographic order over bits: flipping site k moves the index by 2^(n-1-k)
                step = 1 << (n - 1 - k)
                rows.append(col - step if c[k] else col + step)
                cols.append(col)
                vals.append(spec.lambda_x)
    return basis, HamiltonianPair(e0, _assemble(basis.dim, rows, cols, vals))


_BUILDERS = {
    LMG: build_lmg,
    Dicke: build_dicke,
    DefectXXZ: build_defect_xxz,
    DefectIsing: build_defect_ising,
}


def build_model(spec: ModelSpec):
    """Dispatch on the spec type; returns ``(BasisCatalog, HamiltonianPair)``."""
    try:
        builder = _BUILDERS[type(spec)]
    except KeyError:
        raise TypeError(f"unknown model spec {type(spec).__name__}") from None
    return builder(spec)


def symmetry_sectors(spec: ModelSpec, basis: BasisCatalog) -> np.ndarray:
    """Integer label of the conserved-quantity sector of every basis state.

    Dicke states carry the parity ``(-1)^(n + m + j)``.  In the defect Ising
    chain a spin that the transverse field never reaches keeps its sigma_z.
    Other models return a single sector.
    """
    if isinstance(spec, Dicke):
        j = spec.n_atoms / 2
        return np.array([int(round(n + m + j)) % 2 for n, m in basis.labels])
    if isinstance(spec, DefectIsing) and not spec.field_all_sites:
        return np.array([lab[-1] for lab in basis.labels])
    return np.zeros(basis.dim, dtype=int)
