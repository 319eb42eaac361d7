"""Run a configured experiment end to end and write CSVs plus a manifest."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import chaoticity, correlations as corr, dynamics as dyn
from .config import RunConfig, config_to_dict
from .coupling import build_graph, compute_stats, write_stats_csv
from .io import sha256_file
from .models import HamiltonianPair, build_model, symmetry_sectors
from .sparse import randomize_signs
from .spectral import diagonalize, select_window, write_spectrum_csv

log = logging.getLogger(__name__)

_EIGENVECTOR_ANALYSES = {"efshape", "corr1", "corr2", "corr1_signed", "corr_sign", "all_pairs", "dynamics"}


def _grid(cfg: RunConfig, s, w) -> corr.BinGrid:
    if cfg.grid == "auto":
        return corr.auto_grid(s, w, cfg.auto_bins)
    return corr.BinGrid(cfg.grid.eps_min, cfg.grid.eps_max, cfg.grid.n_bins)


def run_pipeline(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Build, diagonalize and analyze; returns the manifest that is also
    written to ``manifest.json`` in the output directory."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    basis, h = build_model(cfg.model)
    if cfg.sign_flip is not None:
        h = HamiltonianPair(h.e0, randomize_signs(h.v, cfg.sign_flip.fraction, cfg.sign_flip.seed))
    log.info("model dim=%d nnz_upper=%d", h.dim, h.v.nnz_upper)

    g = build_graph(h.v)
    stats = compute_stats(h.v, g)
    files.append(write_stats_csv(stats, out / "coupling_stats.csv"))

    s = diagonalize(h, cfg.solver)
    files.append(write_spectrum_csv(s, out / "spectrum.csv"))
    w = select_window(s, cfg.window_count)
    manifest = {
        "config": config_to_dict(cfg),
        "dim": h.dim,
        "nnz_upper": h.v.nnz_upper,
        "window": [int(w.alpha_indices[0]), int(w.alpha_indices[-1])],
        "d": w.d,
        "coupling_stats": stats.as_dict(),
    }

    wanted = set(cfg.analyses)
    if wanted & _EIGENVECTOR_ANALYSES - {"dynamics"}:
        grid = _grid(cfg, s, w)
        manifest["grid"] = {"eps_min": grid.eps_min, "eps_max": grid.eps_max, "n_bins": grid.n_bins}
        pi = corr.ef_shape(s, w, grid)
        if "efshape" in wanted:
            files.append(corr.write_binned_csv(out / "efshape.csv", pi))
        if "corr1" in wanted:
            c1 = corr.corr1(s, w, g, grid, pi)
            files.append(corr.write_binned_csv(out / "corr1.csv", c1, corr.predict_c1(stats, grid)))
        if "corr2" in wanted:
            c2, pi_d, eta = corr.corr2(s, w, g, grid, pi)
            files.append(corr.write_binned_csv(out / "corr2.csv", c2, corr.predict_c2(stats, eta, grid)))
            files.append(corr.write_binned_csv(out / "corr2_pi_d.csv", pi_d))
            files.append(corr.write_binned_csv(out / "corr2_eta.csv", eta))
        if "corr1_signed" in wanted:
            plus, minus, weighted = corr.corr1_signed(s, w, g, grid, pi)
            pred = corr.predict_c1_weighted(stats, grid)
            files.append(corr.write_binned_csv(out / "corr1_plus.csv", plus))
            files.append(corr.write_binned_csv(out / "corr1_minus.csv", minus))
            files.append(corr.write_binned_csv(out / "corr1_weighted.csv", weighted, pred))
        if "corr_sign" in wanted:
            files.append(corr.write_binned_csv(out / "corr_sign.csv", corr.corr_sign(s, w, g, grid)))
        if "all_pairs" in wanted:
            ap = corr.corr_all_pairs(s, w, grid, cfg.all_pairs.sample_cap, cfg.all_pairs.seed, pi)
            files.append(corr.write_binned_csv(out / "all_pairs.csv", ap))

    if "dynamics" in wanted:
        d = cfg.dynamics
        i = dyn.pick_initial_state(s.e0, g) if d.initial == "median" else int(d.initial)
        if not 0 <= i < h.dim:
            raise ValueError(f"dynamics.initial={i} out of range")
        tgrid = dyn.TimeGrid.from_window(w, d.t_max_over_tau, d.steps)
        res = dyn.run_dynamics(s, i, g, tgrid, stats.n_bar, stats.v_bar)
        files.append(dyn.write_dynamics_csv(out / "dynamics.csv", res, tgrid))
        manifest["dynamics"] = {
            "initial_index": i,
            "initial_label": list(basis.labels[i]),
            "tau": tgrid.tau,
            "relative_l2_error": res.relative_l2_error(),
        }

    if "spacings" in wanted:
        sp = cfg.spacings
        spectra = chaoticity.sector_spectra(h, symmetry_sectors(cfg.model, basis))
        report = chaoticity.spacing_report(spectra, sp.fraction, sp.poly_degree, sp.n_bins)
        files.extend(chaoticity.write_spacings_csv(report, out / "spacings.csv", out / "spacings_summary.csv"))
        manifest["spacings"] = {"mean_ratio": report.mean_ratio, "n_sectors": len(spectra)}

    manifest["files"] = {p.name: sha256_file(p) for p in files}
    with open(out / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
