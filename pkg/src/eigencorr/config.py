"""JSON run configuration with strict validation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .models import MODEL_NAMES, ModelSpec

ANALYSES = ("efshape", "corr1", "corr2", "corr1_signed", "corr_sign", "all_pairs", "dynamics", "spacings")
SOLVER_NAMES = ("lapack", "householder", "jacobi")

# JSON keys that differ from the dataclass field names
_MODEL_ALIASES = {"lambda": "lam"}
_INTEGER_FIELDS = {
    "lmg": {"omega"},
    "dicke": {"n_atoms", "n_max"},
    "defect_xxz": {"n_sites"},
    "defect_ising": {"n_sites"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SignFlip:
    fraction: float
    seed: int = 0


@dataclass(frozen=True)
class GridSpec:
    eps_min: float
    eps_max: float
    n_bins: int = 81


@dataclass(frozen=True)
class DynamicsSpec:
    initial: Union[int, str] = "median"
    t_max_over_tau: float = 1000.0
    steps: int = 1000


@dataclass(frozen=True)
class AllPairsSpec:
    sample_cap: int = 200_000
    seed: int = 0


@dataclass(frozen=True)
class SpacingsSpec:
    fraction: float = 0.5
    poly_degree: int = 6
    n_bins: int = 30


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    analyses: tuple
    sign_flip: Optional[SignFlip] = None
    window_count: int = 50
    grid: Union[str, GridSpec] = "auto"
    auto_bins: int = 81
    dynamics: DynamicsSpec = field(default_factory=DynamicsSpec)
    all_pairs: AllPairsSpec = field(default_factory=AllPairsSpec)
    spacings: SpacingsSpec = field(default_factory=SpacingsSpec)
    solver: str = "lapack"
    output_dir: str = "out"


def _fields(cls):
    return {f.name for f in dataclasses.fields(cls)}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(data) - _fields(cls)
    if unknown:
        raise ConfigError(f"{where}.{sorted(unknown)[0]}: unknown key")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _number(x, where, integer=False):
    ok = isinstance(x, int) if integer else isinstance(x, (int, float))
    if isinstance(x, bool) or not ok:
        raise ConfigError(f"{where}: expected {'an integer' if integer else 'a number'}")
    return x


def parse_model(data) -> ModelSpec:
    if not isinstance(data, dict) or "name" not in data:
        raise ConfigError("model.name: required")
    params = dict(data)
    name = params.pop("name")
    if name not in MODEL_NAMES:
        raise ConfigError(f"model.name: unknown model {name!r}; choose from {sorted(MODEL_NAMES)}")
    cls = MODEL_NAMES[name]
    params = {_MODEL_ALIASES.get(k, k): v for k, v in params.items()}
    unknown = set(params) - _fields(cls)
    if unknown:
        raise ConfigError(f"model.{sorted(unknown)[0]}: unknown key for {name}")
    for k, v in params.items():
        if k == "defect_sites":
            if not isinstance(v, list) or len(v) != 2:
                raise ConfigError("model.defect_sites: expected a list of two site numbers")
            params[k] = tuple(_number(x, "model.defect_sites", integer=True) for x in v)
        elif k in ("boundary", "sz_convention"):
            if not isinstance(v, str):
                raise ConfigError(f"model.{k}: expected a string")
        elif k == "field_all_sites":
            if not isinstance(v, bool):
                raise ConfigError(f"model.{k}: expected true or false")
        else:
            _number(v, f"model.{k}", integer=k in _INTEGER_FIELDS[name])
    try:
        return cls(**params)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None


def model_to_dict(spec: ModelSpec) -> dict:
    name = next(k for k, v in MODEL_NAMES.items() if isinstance(spec, v))
    inverse = {v: k for k, v in _MODEL_ALIASES.items()}
    out = {"name": name}
    for f in dataclasses.fields(spec):
        val = getattr(spec, f.name)
        out[inverse.get(f.name, f.name)] = list(val) if isinstance(val, tuple) else val
    return out


def config_from_dict(data) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    unknown = set(data) - _fields(RunConfig)
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown key")
    if "model" not in data:
        raise ConfigError("model: required")
    if "analyses" not in data:
        raise ConfigError("analyses: required")
    kw = {"model": parse_model(data["model"])}

    analyses = data["analyses"]
    if not isinstance(analyses, list) or not analyses:
        raise ConfigError("analyses: expected a nonempty list")
    for a in analyses:
        if a not in ANALYSES:
            raise ConfigError(f"analyses: unknown analysis {a!r}")
    kw["analyses"] = tuple(dict.fromkeys(analyses))

    if data.get("sign_flip") is not None:
        sf = _build(SignFlip, data["sign_flip"], "sign_flip")
        _number(sf.fraction, "sign_flip.fraction")
        _number(sf.seed, "sign_flip.seed", integer=True)
        if not 0 <= sf.fraction <= 1:
            raise ConfigError("sign_flip.fraction: must lie in [0, 1]")
        kw["sign_flip"] = sf

    if "window_count" in data:
        wc = _number(data["window_count"], "window_count", integer=True)
        if wc < 2:
            raise ConfigError("window_count: must be >= 2")
        kw["window_count"] = wc

    if "grid" in data:
        grid = data["grid"]
        if grid == "auto":
            kw["grid"] = "auto"
        else:
            gs = _build(GridSpec, grid, "grid")
            _number(gs.eps_min, "grid.eps_min")
            _number(gs.eps_max, "grid.eps_max")
            _number(gs.n_bins, "grid.n_bins", integer=True)
            if not gs.eps_min < gs.eps_max:
                raise ConfigError("grid: eps_min must be smaller than eps_max")
            if gs.n_bins < 1:
                raise ConfigError("grid.n_bins: must be >= 1")
            kw["grid"] = gs

    if "auto_bins" in data:
        ab = _number(data["auto_bins"], "auto_bins", integer=True)
        if ab < 1:
            raise ConfigError("auto_bins: must be >= 1")
        kw["auto_bins"] = ab

    if "dynamics" in data:
        dy = _build(DynamicsSpec, data["dynamics"], "dynamics")
        if dy.initial != "median":
            _number(dy.initial, "dynamics.initial", integer=True)
        if _number(dy.t_max_over_tau, "dynamics.t_max_over_tau") <= 0:
            raise ConfigError("dynamics.t_max_over_tau: must be positive")
        if _number(dy.steps, "dynamics.steps", integer=True) < 1:
            raise ConfigError("dynamics.steps: must be >= 1")
        kw["dynamics"] = dy

    if "all_pairs" in data:
        ap = _build(AllPairsSpec, data["all_pairs"], "all_pairs")
        if _number(ap.sample_cap, "all_pairs.sample_cap", integer=True) < 1:
            raise ConfigError("all_pairs.sample_cap: must be >= 1")
        _number(ap.seed, "all_pairs.seed", integer=True)
        kw["all_pairs"] = ap

    if "spacings" in data:
        sp = _build(SpacingsSpec, data["spacings"], "spacings")
        if not 0 < _number(sp.fraction, "spacings.fraction") <= 1:
            raise ConfigError("spacings.fraction: must lie in (0, 1]")
        _number(sp.poly_degree, "spacings.poly_degree", integer=True)
        _number(sp.n_bins, "spacings.n_bins", integer=True)
        kw["spacings"] = sp

    if "solver" in data:
        if data["solver"] not in SOLVER_NAMES:
            raise ConfigError(f"solver: choose from {list(SOLVER_NAMES)}")
        kw["solver"] = data["solver"]

    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError("output_dir: expected a string")
        kw["output_dir"] = data["output_dir"]
    return RunConfig(**kw)


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {
        "model": model_to_dict(cfg.model),
        "analyses": list(cfg.analyses),
        "sign_flip": dataclasses.asdict(cfg.sign_flip) if cfg.sign_flip else None,
        "window_count": cfg.window_count,
        "grid": cfg.grid if cfg.grid == "auto" else dataclasses.asdict(cfg.grid),
        "auto_bins": cfg.auto_bins,
        "dynamics": dataclasses.asdict(cfg.dynamics),
        "all_pairs": dataclasses.asdict(cfg.all_pairs),
        "spacings": dataclasses.asdict(cfg.spacings),
        "solver": cfg.solver,
        "output_dir": cfg.output_dir,
    }
    return out
