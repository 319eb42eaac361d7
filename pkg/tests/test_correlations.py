import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigencorr import correlations as corr
from eigencorr.coupling import build_graph, compute_stats
from eigencorr.models import DefectIsing, HamiltonianPair, build_model
from eigencorr.sparse import SymmetricSparse
from eigencorr.spectral import SpectralData, diagonalize, select_window


def _system(seed, dim=14, density=0.3):
    rng = np.random.default_rng(seed)
    a = np.triu(rng.uniform(-1, 1, (dim, dim)) * (rng.random((dim, dim)) < density), 1)
    h = HamiltonianPair(rng.uniform(-2, 2, dim), SymmetricSparse.from_matrix(a + a.T))
    s = diagonalize(h)
    g = build_graph(h.v)
    return h, s, g


def _loop_oracle(s, w, g, grid, v):
    """Straight loops over the definitions."""
    nb = grid.n_bins
    pi_s, pi_n = np.zeros(nb), np.zeros(nb)
    c1_s, c1_n = np.zeros(nb), np.zeros(nb)
    c2_s, c2_n, d_s = np.zeros(nb), np.zeros(nb), np.zeros(nb)
    dense = v.to_dense()
    dim = s.dim
    for a in w.alpha_indices:
        c = s.components[a]
        for i in range(dim):
            b = grid.index([s.e0[i] - s.energies[a]])[0]
            if b < 0:
                continue
            pi_s[b] += c[i] ** 2
            pi_n[b] += 1
            for j in range(dim):
                if dense[i, j] != 0:
                    c1_s[b] += c[i] * c[j]
                    c1_n[b] += 1
        for k in range(dim):
            b = grid.index([s.e0[k] - s.energies[a]])[0]
            if b < 0:
                continue
            for i in range(dim):
                for j in range(dim):
                    if i != j and dense[i, k] != 0 and dense[k, j] != 0 and dense[i, j] == 0:
                        c2_s[b] += c[i] * c[j]
                        d_s[b] += c[i] ** 2
                        c2_n[b] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        pi = pi_s / pi_n
        return pi, c1_s / c1_n / pi, c2_s / c2_n / pi, d_s / c2_n / pi


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_estimators_match_loops(seed):
    h, s, g = _system(seed)
    w = select_window(s, 6)
    grid = corr.BinGrid(-3.0, 3.0, 9)
    pi, c1, c2, eta = _loop_oracle(s, w, g, grid, h.v)
    got_pi = corr.ef_shape(s, w, grid)
    np.testing.assert_allclose(got_pi.mean, pi, atol=1e-13, equal_nan=True)
    ok = pi > 0
    np.testing.assert_allclose(corr.corr1(s, w, g, grid).mean[ok], c1[ok], atol=1e-12, equal_nan=True)
    g2, _, e2 = corr.corr2(s, w, g, grid)
    np.testing.assert_allclose(g2.mean[ok], c2[ok], atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(e2.mean[ok], eta[ok], atol=1e-12, equal_nan=True)


def test_zero_perturbation_concentrates_at_zero():
    e0 = np.array([0.0, 0.4, 1.1, 1.5, 2.2])
    s = diagonalize(HamiltonianPair(e0, SymmetricSparse.empty(5)))
    w = select_window(s, 5)
    grid = corr.auto_grid(s, w, 11)
    pi = corr.ef_shape(s, w, grid)
    weight = np.nan_to_num(pi.mean) * pi.count
    zero = grid.index([0.0])[0]
    assert weight[zero] == pytest.approx(5.0)
    assert np.all(np.delete(weight, zero) == 0)


def test_shape_is_normalized_per_eigenstate():
    _, s, _ = _system(5, dim=20)
    w = select_window(s, 8)
    pi = corr.ef_shape(s, w, corr.auto_grid(s, w, 21))
    assert pi.count.sum() == 8 * 20
    assert np.nansum(pi.mean * pi.count) == pytest.approx(8.0)


def test_two_level_closed_form():
    delta, v = 1.0, 0.35
    h = HamiltonianPair(np.array([0.0, delta]), SymmetricSparse.from_matrix(np.array([[0, v], [v, 0]])))
    s = diagonalize(h)
    w = select_window(s, 2)
    g = build_graph(h.v)
    grid = corr.BinGrid(-4.0, 4.0, 400)
    om = np.sqrt(delta**2 + 4 * v**2)
    e_lo, e_hi = (delta - om) / 2, (delta + om) / 2
    c1 = corr.corr1(s, w, g, grid)
    pi = corr.ef_shape(s, w, grid)
    for e_a, sign in ((e_lo, -1), (e_hi, 1)):
        prod = sign * v / om
        for i, e_i in enumerate((0.0, delta)):
            # weight of basis state i in eigenstate a
            w_ai = v**2 / (v**2 + (e_a - 0.0) ** 2) if i == 0 else (e_a**2) / (v**2 + e_a**2)
            assert pi.at(e_i - e_a) == pytest.approx(w_ai, abs=1e-12)
            assert c1.at(e_i - e_a) == pytest.approx(prod / w_ai, abs=1e-12)


@given(st.integers(0, 2**20), st.lists(st.booleans(), min_size=16, max_size=16))
@settings(max_examples=20, deadline=None)
def test_invariant_under_eigenvector_signs(seed, flips):
    h, s, g = _system(seed, dim=16)
    flipped = SpectralData(s.energies, s.components * np.where(flips, -1.0, 1.0)[:, None], s.e0)
    w = select_window(s, 10)
    grid = corr.auto_grid(s, w, 15)
    for fn in (corr.corr1, corr.corr_sign):
        np.testing.assert_array_equal(fn(s, w, g, grid).mean, fn(flipped, w, g, grid).mean)
    a, b = corr.corr2(s, w, g, grid)[0], corr.corr2(flipped, w, g, grid)[0]
    np.testing.assert_array_equal(a.mean, b.mean)


def test_counts_are_conserved():
    h, s, g = _system(3, dim=18)
    w = select_window(s, 7)
    grid = corr.auto_grid(s, w, 13)
    assert corr.corr1(s, w, g, grid).count.sum() == 7 * len(g.s1)
    assert corr.corr2(s, w, g, grid)[0].count.sum() == 7 * len(g.s2_triples)
    assert corr.corr_all_pairs(s, w, grid).count.sum() == 7 * 18 * 17
    plus, minus, wt = corr.corr1_signed(s, w, g, grid)
    assert plus.count.sum() + minus.count.sum() == wt.count.sum()


def test_bin_edges():
    grid = corr.BinGrid(-1.0, 1.0, 4)
    np.testing.assert_array_equal(grid.index([-1.0, -0.5, 0.0, 0.99, 1.0, 1.01, -1.2]), [0, 1, 2, 3, 3, -1, -1])
    np.testing.assert_allclose(grid.centers, [-0.75, -0.25, 0.25, 0.75])
    with pytest.raises(ValueError):
        corr.BinGrid(1.0, 1.0)


def test_auto_grid_covers_window():
    h, s, g = _system(4)
    w = select_window(s, 5)
    grid = corr.auto_grid(s, w)
    eps = s.e0[None, :] - s.energies[w.alpha_indices][:, None]
    assert np.all(grid.index(eps) >= 0)
    assert grid.eps_min == -grid.eps_max and grid.n_bins == corr.DEFAULT_BINS


def test_predictions():
    _, h = build_model(DefectIsing())
    stats = compute_stats(h.v, build_graph(h.v))
    grid = corr.BinGrid(-2.0, 2.0, 5)
    np.testing.assert_allclose(corr.predict_c1(stats, grid).mean, -grid.centers / (0.45 * 9))
    np.testing.assert_allclose(corr.predict_c1_weighted(stats, grid).mean, -grid.centers / (0.45 * 9))
    p2 = corr.predict_c2(stats, 0.5, grid)
    np.testing.assert_allclose(p2.mean, (grid.centers**2 - 0.2025 * 9 * 0.5) / (0.2025 * 72))
    eta = corr.BinnedStatistic(grid.centers, np.array([np.nan, 1, 1, 1, np.nan]), np.ones(5, int))
    assert np.isnan(corr.predict_c2(stats, eta, grid).mean[[0, 4]]).all()


def test_degenerate_predictions():
    v = SymmetricSparse.from_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    stats = compute_stats(v, build_graph(v))
    grid = corr.BinGrid(-1, 1, 3)
    with pytest.raises(corr.DegenerateStatsError):
        corr.predict_c2(stats, 1.0, grid)
    empty = SymmetricSparse.empty(3)
    with pytest.raises(corr.DegenerateStatsError):
        corr.predict_c1(compute_stats(empty, build_graph(empty)), grid)


def test_homogeneous_signs():
    _, h = build_model(DefectIsing(n_sites=7))
    s, g = diagonalize(h), build_graph(h.v)
    w = select_window(s, 20)
    grid = corr.auto_grid(s, w, 21)
    c1 = corr.corr1(s, w, g, grid)
    plus, minus, wt = corr.corr1_signed(s, w, g, grid)
    np.testing.assert_array_equal(plus.mean, c1.mean)
    np.testing.assert_array_equal(wt.mean, c1.mean)
    assert not minus.present.any()


def test_all_pairs_cap_and_seed():
    h, s, g = _system(6, dim=12)
    w = select_window(s, 4)
    grid = corr.auto_grid(s, w, 9)
    full = corr.corr_all_pairs(s, w, grid, sample_cap=None)
    big = corr.corr_all_pairs(s, w, grid, sample_cap=10**6, seed=3)
    np.testing.assert_array_equal(full.mean, big.mean)
    a = corr.corr_all_pairs(s, w, grid, sample_cap=50, seed=3)
    b = corr.corr_all_pairs(s, w, grid, sample_cap=50, seed=3)
    np.testing.assert_array_equal(a.mean, b.mean)
    assert a.count.sum() == 4 * 50
    # over ordered pairs i != j, sum C_ai C_aj = (sum_i C_ai)^2 - 1 for each eigenstate
    c = s.components[w.alpha_indices]
    total = sum((row.sum() ** 2 - 1.0) for row in c)
    pi = corr.ef_shape(s, w, grid)
    raw = np.nansum(full.mean * pi.mean * full.count)
    assert raw == pytest.approx(total, abs=1e-12)


def test_central_bins_and_fit():
    centers = np.linspace(-1, 1, 5)
    pi = corr.BinnedStatistic(centers, np.array([0.001, 0.5, 1.0, 0.2, np.nan]), np.ones(5, int))
    np.testing.assert_array_equal(corr.central_bins(pi), [False, True, True, True, False])
    line = corr.BinnedStatistic(centers, 3 - 2 * centers, np.ones(5, int))
    np.testing.assert_allclose(corr.fit_polynomial(line, np.ones(5, bool), 1), [-2, 3])
    with pytest.raises(ValueError):
        corr.fit_polynomial(line, np.array([1, 0, 0, 0, 0], bool), 1)


def test_binned_csv(tmp_path):
    stat = corr.BinnedStatistic(np.array([-0.5, 0.5]), np.array([np.nan, 0.25]), np.array([0, 3]))
    pred = corr.BinnedStatistic(stat.centers, np.array([1.0, -1.0]), np.ones(2, int))
    p = corr.write_binned_csv(tmp_path / "x.csv", stat, pred)
    assert p.read_bytes() == b"eps_center,value,count,prediction\n-0.5,,0,1\n0.5,0.25,3,-1\n"
