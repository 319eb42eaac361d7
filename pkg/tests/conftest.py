import functools
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eigencorr import correlations as corr
from eigencorr.coupling import build_graph, compute_stats
from eigencorr.models import LMG, Dicke, DefectIsing, DefectXXZ, HamiltonianPair, build_model
from eigencorr.sparse import randomize_signs
from eigencorr.spectral import diagonalize, select_window

DEFAULT_SPECS = {
    "lmg": LMG(),
    "dicke": Dicke(),
    "defect_xxz": DefectXXZ(),
    "defect_ising": DefectIsing(),
}
FLIP_FRACTION = 0.30
FLIP_SEED = 1234
WINDOW = 50


@dataclass
class Prepared:
    spec: object
    basis: object
    h: HamiltonianPair
    graph: object
    stats: object
    spectral: object
    window: object
    grid: object
    pi: object

    @property
    def central(self):
        return corr.central_bins(self.pi)


@functools.lru_cache(maxsize=None)
def prepared(name, flipped=False):
    spec = DEFAULT_SPECS[name]
    basis, h = build_model(spec)
    if flipped:
        h = HamiltonianPair(h.e0, randomize_signs(h.v, FLIP_FRACTION, FLIP_SEED))
    g = build_graph(h.v)
    s = diagonalize(h)
    w = select_window(s, WINDOW)
    grid = corr.auto_grid(s, w)
    return Prepared(spec, basis, h, g, compute_stats(h.v, g), s, w, grid, corr.ef_shape(s, w, grid))


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
