"""Pipeline configuration: versioned JSON schema with exhaustive validation.

The config owns every knob of the pipeline; stages never hard-code
geometry. ``load_config`` -> dataclasses -> ``dump_config`` round-trips
all fields exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .boundary import BoundarySpec
from .errors import ConfigError
from .motion import AffineMotion
from .phantom import Ellipse, PhantomSpec, check_support_in_unit_disk
from .projection import ScanGeometry
from .reconstruct import FilterSpec, ImageSpec

CONFIG_VERSION = 1


@dataclass
class MaterialConfig:
    lame_lambda: float = 3460.0
    lame_mu: float = 1480.0


@dataclass
class PriorConfig:
    spine_density: float = 1850.0
    soft_tissue_density: float = 1050.0


@dataclass
class SolverConfig:
    grid_nx: int = 257
    grid_ny: int = 257
    cfl_safety: float = 0.9
    num_snapshots: int = 133


@dataclass
class BoundaryConfig:
    spec: BoundarySpec = field(default_factory=BoundarySpec)
    num_sample_times: int = 661


@dataclass
class PipelineConfig:
    version: int = CONFIG_VERSION
    seed: int = 1
    output_dir: str = "out"
    phantom: PhantomSpec = field(default_factory=PhantomSpec)
    motion: AffineMotion = field(default_factory=AffineMotion)
    scan: ScanGeometry = field(default_factory=ScanGeometry)
    material: MaterialConfig = field(default_factory=MaterialConfig)
    prior: PriorConfig = field(default_factory=PriorConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    filter: FilterSpec = field(default_factory=lambda: FilterSpec(gamma=2.0 / 450.0))
    image: ImageSpec = field(default_factory=ImageSpec)


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"config: missing key {where}.{key}")
    return d[key]


def _number(d: dict, key: str, where: str) -> float:
    v = _require(d, key, where)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
        raise ConfigError(f"config: {where}.{key} must be a finite number, got {v!r}")
    return float(v)


def _integer(d: dict, key: str, where: str) -> int:
    v = _require(d, key, where)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"config: {where}.{key} must be an integer, got {v!r}")
    return v


def _pair(d: dict, key: str, where: str) -> tuple[float, float]:
    v = _require(d, key, where)
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ConfigError(f"config: {where}.{key} must be a pair of numbers")
    return (float(v[0]), float(v[1]))


def config_from_dict(raw: dict) -> PipelineConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    version = _integer(raw, "version", "")
    if version != CONFIG_VERSION:
        raise ConfigError(f"config: unsupported version {version} (expected {CONFIG_VERSION})")

    ph_raw = _require(raw, "phantom", "")
    ellipses = []
    for k, e in enumerate(_require(ph_raw, "ellipses", "phantom")):
        where = f"phantom.ellipses[{k}]"
        ellipses.append(
            Ellipse(
                center=_pair(e, "center", where),
                semi_axes=_pair(e, "semi_axes", where),
                rotation=_number(e, "rotation", where),
                density=_number(e, "density", where),
                label=str(e.get("label", "")),
            )
        )
    phantom = PhantomSpec(ellipses=ellipses)

    mo = _require(raw, "motion", "")
    motion = AffineMotion(
        amplitude=_number(mo, "amplitude", "motion"),
        frequency=_number(mo, "frequency", "motion"),
        offset=_number(mo, "offset", "motion"),
        drift_coeff=_number(mo, "drift_coeff", "motion"),
    )

    sc = _require(raw, "scan", "")
    scan = ScanGeometry(
        num_angles=_integer(sc, "num_angles", "scan"),
        angle_start=_number(sc, "angle_start", "scan"),
        angle_end=_number(sc, "angle_end", "scan"),
        num_detectors=_integer(sc, "num_detectors", "scan"),
        detector_min=_number(sc, "detector_min", "scan"),
        detector_max=_number(sc, "detector_max", "scan"),
        time_offset=_number(sc, "time_offset", "scan"),
        time_scale=_number(sc, "time_scale", "scan"),
    )

    ma = _require(raw, "material", "")
    material = MaterialConfig(
        lame_lambda=_number(ma, "lame_lambda", "material"),
        lame_mu=_number(ma, "lame_mu", "material"),
    )

    pr = _require(raw, "prior", "")
    prior = PriorConfig(
        spine_density=_number(pr, "spine_density", "prior"),
        soft_tissue_density=_number(pr, "soft_tissue_density", "prior"),
    )

    so = _require(raw, "solver", "")
    solver = SolverConfig(
        grid_nx=_integer(so, "grid_nx", "solver"),
        grid_ny=_integer(so, "grid_ny", "solver"),
        cfl_safety=_number(so, "cfl_safety", "solver"),
        num_snapshots=_integer(so, "num_snapshots", "solver"),
    )

    bo = _require(raw, "boundary", "")
    mode = _require(bo, "mode", "boundary")
    boundary = BoundaryConfig(
        spec=BoundarySpec(
            mode=str(mode),
            noise_std=_number(bo, "noise_std", "boundary"),
            num_nodes=_integer(bo, "num_nodes", "boundary"),
            rng_seed=_integer(bo, "rng_seed", "boundary"),
            time_constant_noise=bool(bo.get("time_constant_noise", False)),
        ),
        num_sample_times=_integer(bo, "num_sample_times", "boundary"),
    )

    fi = _require(raw, "filter", "")
    filt = FilterSpec(gamma=_number(fi, "gamma", "filter"), dft_size=_integer(fi, "dft_size", "filter"))

    im = _require(raw, "image", "")
    image = ImageSpec(nx=_integer(im, "nx", "image"), ny=_integer(im, "ny", "image"))

    cfg = PipelineConfig(
        version=version,
        seed=_integer(raw, "seed", ""),
        output_dir=str(_require(raw, "output_dir", "")),
        phantom=phantom,
        motion=motion,
        scan=scan,
        material=material,
        prior=prior,
        solver=solver,
        boundary=boundary,
        filter=filt,
        image=image,
    )
    validate_config(cfg)
    return cfg


def config_to_dict(cfg: PipelineConfig) -> dict:
    return {
        "version": cfg.version,
        "seed": cfg.seed,
        "output_dir": cfg.output_dir,
        "phantom": {
            "ellipses": [
                {
                    "center": list(e.center),
                    "semi_axes": list(e.semi_axes),
                    "rotation": e.rotation,
                    "density": e.density,
                    "label": e.label,
                }
                for e in cfg.phantom.ellipses
            ]
        },
        "motion": {
            "amplitude": cfg.motion.amplitude,
            "frequency": cfg.motion.frequency,
            "offset": cfg.motion.offset,
            "drift_coeff": cfg.motion.drift_coeff,
        },
        "scan": {
            "num_angles": cfg.scan.num_angles,
            "angle_start": cfg.scan.angle_start,
            "angle_end": cfg.scan.angle_end,
            "num_detectors": cfg.scan.num_detectors,
            "detector_min": cfg.scan.detector_min,
            "detector_max": cfg.scan.detector_max,
            "time_offset": cfg.scan.time_offset,
            "time_scale": cfg.scan.time_scale,
        },
        "material": {"lame_lambda": cfg.material.lame_lambda, "lame_mu": cfg.material.lame_mu},
        "prior": {
            "spine_density": cfg.prior.spine_density,
            "soft_tissue_density": cfg.prior.soft_tissue_density,
        },
        "solver": {
            "grid_nx": cfg.solver.grid_nx,
            "grid_ny": cfg.solver.grid_ny,
            "cfl_safety": cfg.solver.cfl_safety,
            "num_snapshots": cfg.solver.num_snapshots,
        },
        "boundary": {
            "mode": cfg.boundary.spec.mode,
            "noise_std": cfg.boundary.spec.noise_std,
            "num_nodes": cfg.boundary.spec.num_nodes,
            "rng_seed": cfg.boundary.spec.rng_seed,
            "time_constant_noise": cfg.boundary.spec.time_constant_noise,
            "num_sample_times": cfg.boundary.num_sample_times,
        },
        "filter": {"gamma": cfg.filter.gamma, "dft_size": cfg.filter.dft_size},
        "image": {"nx": cfg.image.nx, "ny": cfg.image.ny},
    }


def validate_config(cfg: PipelineConfig) -> None:
    """Check every module precondition the pipeline relies on."""
    problems: list[str] = []
    if not cfg.phantom.ellipses:
        problems.append("phantom.ellipses must not be empty")
    try:
        cfg.phantom.require_labeled("body")
    except ConfigError as exc:
        problems.append(str(exc))
    try:
        cfg.phantom.require_labeled("spine")
    except ConfigError as exc:
        problems.append(str(exc))
    if cfg.seed < 0:
        problems.append("seed must be >= 0")
    if cfg.solver.grid_nx < 9 or cfg.solver.grid_ny < 9:
        problems.append("solver grid must be at least 9x9")
    if not (0.0 < cfg.solver.cfl_safety <= 1.0):
        problems.append("solver.cfl_safety must be in (0, 1]")
    if cfg.solver.num_snapshots < 2:
        problems.append("solver.num_snapshots must be >= 2")
    if cfg.boundary.num_sample_times < 2:
        problems.append("boundary.num_sample_times must be >= 2")
    try:
        cfg.boundary.spec.validate()
    except ConfigError as exc:
        problems.append(str(exc))
    if cfg.material.lame_mu <= 0:
        problems.append("material.lame_mu must be positive")
    if cfg.material.lame_lambda + 2 * cfg.material.lame_mu <= 0:
        problems.append("material.lame_lambda + 2*mu must be positive")
    if cfg.prior.spine_density <= 0 or cfg.prior.soft_tissue_density <= 0:
        problems.append("prior densities must be positive")
    try:
        cfg.filter.validate(cfg.scan.num_detectors)
    except ConfigError as exc:
        problems.append(str(exc))
    if cfg.image.nx < 2 or cfg.image.ny < 2:
        problems.append("image dimensions must be >= 2")
    if not problems:
        # phantom support must stay in the unit disk over the whole scan
        times = np.linspace(0.0, cfg.scan.t_end, 65)
        r = check_support_in_unit_disk(cfg.phantom, cfg.motion, times)
        if r >= 1.0:
            problems.append(
                f"phantom leaves the unit disk under the motion (max radius {r:.4f})"
            )
    if problems:
        raise ConfigError("invalid config:\n  - " + "\n  - ".join(problems))


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def dump_config(cfg: PipelineConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config_to_dict(cfg), f, indent=2)
        f.write("\n")


def default_config() -> PipelineConfig:
    """The shipped thorax configuration (artifact-chosen phantom values)."""
    text = resources.files("dynact.data").joinpath("default_config.json").read_text()
    return config_from_dict(json.loads(text))
