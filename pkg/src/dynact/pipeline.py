"""Stage orchestration: simulate -> solve-motion -> reconstruct -> evaluate.

Stages communicate exclusively through files in the output directory, so
partial runs and re-runs are possible; identical config and seed give
bit-identical artifacts.
"""

from __future__ import annotations

import json
import os

import numpy as np

from . import formats
from .boundary import BoundaryData, BoundarySpec, perturb, sample_boundary, sparsify
from .config import PipelineConfig
from .deformation import AnalyticDeformation, FieldDeformation
from .domain import EllipseDomain
from .elastic import DisplacementHistory, InitialData, MaterialParams, solve
from .errors import ConfigError, MismatchError
from .grid import Grid2D, make_grid
from .metrics import evaluate
from .phantom import rasterize_f0
from .projection import simulate_scan
from .reconstruct import Image, reconstruct, static_fbp

PDE_MODES = ("exact", "noisy", "sparse")


def _out(cfg: PipelineConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def solver_grid(cfg: PipelineConfig) -> Grid2D:
    domain = EllipseDomain.from_ellipse(cfg.phantom.require_labeled("body"))
    x = np.linspace(-1.0, 1.0, cfg.solver.grid_nx)
    y = np.linspace(-1.0, 1.0, cfg.solver.grid_ny)
    return make_grid(x, y, domain)


def build_density_prior(cfg: PipelineConfig, grid: Grid2D) -> np.ndarray:
    """Two-value density prior: spine disk vs soft tissue everywhere else."""
    spine = cfg.phantom.require_labeled("spine")
    body = EllipseDomain.from_ellipse(cfg.phantom.require_labeled("body"))
    if not np.all(body.inside(spine.boundary_points(64))):
        raise ConfigError("spine prior region lies outside the solver domain")
    rho = np.full(grid.shape, cfg.prior.soft_tissue_density)
    X, Y = np.meshgrid(grid.x_coords, grid.y_coords, indexing="ij")
    in_spine = spine.contains(np.stack([X, Y], axis=-1))
    rho[in_spine] = cfg.prior.spine_density
    return rho


def boundary_data_for_mode(cfg: PipelineConfig, grid: Grid2D, mode: str) -> BoundaryData:
    times = np.linspace(0.0, cfg.scan.t_end, cfg.boundary.num_sample_times)
    bd = sample_boundary(cfg.motion, grid, times)
    if mode == "exact":
        return bd
    spec = BoundarySpec(
        mode=mode,
        noise_std=cfg.boundary.spec.noise_std,
        num_nodes=cfg.boundary.spec.num_nodes,
        rng_seed=cfg.boundary.spec.rng_seed,
        time_constant_noise=cfg.boundary.spec.time_constant_noise,
    )
    if mode == "noisy":
        return perturb(bd, spec)
    if mode == "sparse":
        return sparsify(bd, spec, grid)
    raise ConfigError(f"unknown boundary mode {mode!r}")


def solve_motion(cfg: PipelineConfig, mode: str, grid: Grid2D | None = None) -> DisplacementHistory:
    if grid is None:
        grid = solver_grid(cfg)
    params = MaterialParams(
        lame_lambda=cfg.material.lame_lambda,
        lame_mu=cfg.material.lame_mu,
        rho0=build_density_prior(cfg, grid),
    )
    bd = boundary_data_for_mode(cfg, grid, mode)
    t_end = cfg.scan.t_end
    output_times = np.linspace(0.0, t_end, cfg.solver.num_snapshots)
    return solve(grid, params, InitialData.zero(grid.shape), bd, t_end, output_times, safety=cfg.solver.cfl_safety)


def stage_simulate(cfg: PipelineConfig) -> list[str]:
    os.makedirs(cfg.output_dir, exist_ok=True)
    sino = simulate_scan(cfg.phantom, cfg.motion, cfg.scan)
    formats.write_sinogram(_out(cfg, "sinogram.sino"), sino)
    gt = Image(cfg.image, rasterize_f0(cfg.phantom, cfg.image.nx, cfg.image.ny))
    formats.write_image(_out(cfg, "ground_truth.img"), gt)
    formats.write_pgm(_out(cfg, "ground_truth.pgm"), gt)
    return ["sinogram.sino", "ground_truth.img", "ground_truth.pgm"]


def stage_solve_motion(cfg: PipelineConfig, modes: tuple[str, ...] | None = None) -> list[str]:
    os.makedirs(cfg.output_dir, exist_ok=True)
    if modes is None:
        modes = (cfg.boundary.spec.mode,)
    grid = solver_grid(cfg)
    written = []
    for mode in modes:
        history = solve_motion(cfg, mode, grid=grid)
        name = f"field_{mode}.field"
        formats.write_field(_out(cfg, name), history)
        written.append(name)
    return written


def _load_sinogram_checked(cfg: PipelineConfig):
    path = formats.require_file(_out(cfg, "sinogram.sino"))
    sino = formats.read_sinogram(path, time_offset=cfg.scan.time_offset, time_scale=cfg.scan.time_scale)
    g, s = sino.geometry, cfg.scan
    same = (
        g.num_angles == s.num_angles
        and g.num_detectors == s.num_detectors
        and g.angle_start == s.angle_start
        and g.angle_end == s.angle_end
        and g.detector_min == s.detector_min
        and g.detector_max == s.detector_max
    )
    if not same:
        raise MismatchError("sinogram.sino geometry header disagrees with the config scan")
    return sino


def load_field_provider(cfg: PipelineConfig, path: str) -> FieldDeformation:
    x, y, kind, times, fields = formats.read_field(formats.require_file(path))
    domain = EllipseDomain.from_ellipse(cfg.phantom.require_labeled("body"))
    grid = make_grid(x, y, domain)
    if not np.array_equal(grid.kind, kind):
        raise MismatchError(f"{path}: stored node classification does not match the config domain")
    history = DisplacementHistory(times=times, fields=fields, grid=grid, dt=0.0, num_steps=0)
    return FieldDeformation(history)


def stage_reconstruct(cfg: PipelineConfig) -> list[str]:
    os.makedirs(cfg.output_dir, exist_ok=True)
    sino = _load_sinogram_checked(cfg)
    written = []

    def emit(name: str, img: Image):
        formats.write_image(_out(cfg, name + ".img"), img)
        formats.write_pgm(_out(cfg, name + ".pgm"), img)
        written.extend([name + ".img", name + ".pgm"])

    emit("recon_static", static_fbp(sino, cfg.filter, cfg.image))
    emit("recon_exact_motion", reconstruct(sino, AnalyticDeformation(cfg.motion), cfg.filter, cfg.image))
    for mode in PDE_MODES:
        path = _out(cfg, f"field_{mode}.field")
        if os.path.isfile(path):
            provider = load_field_provider(cfg, path)
            emit(f"recon_pde_{mode}", reconstruct(sino, provider, cfg.filter, cfg.image))
    return written


def stage_evaluate(cfg: PipelineConfig) -> list[str]:
    gt = formats.read_image(formats.require_file(_out(cfg, "ground_truth.img")))
    report: dict = {"reference": "ground_truth.img", "metrics_kind": "artifact metrics", "images": {}}
    names = ["recon_static", "recon_exact_motion"] + [f"recon_pde_{m}" for m in PDE_MODES]
    found = False
    for name in names:
        path = _out(cfg, name + ".img")
        if not os.path.isfile(path):
            continue
        found = True
        img = formats.read_image(path)
        report["images"][name] = evaluate(img, gt, cfg.phantom).to_dict()
    if not found:
        raise ConfigError("evaluate: no reconstruction images found in the output directory")
    out = _out(cfg, "report.json")
    with open(out, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    return ["report.json"]


STAGES = ("simulate", "solve-motion", "reconstruct", "evaluate", "all")


def run(stage: str, cfg: PipelineConfig) -> list[str]:
    """Run one stage (or all); returns the artifact names written."""
    if stage == "simulate":
        return stage_simulate(cfg)
    if stage == "solve-motion":
        return stage_solve_motion(cfg)
    if stage == "reconstruct":
        return stage_reconstruct(cfg)
    if stage == "evaluate":
        return stage_evaluate(cfg)
    if stage == "all":
        written = stage_simulate(cfg)
        written += stage_solve_motion(cfg, modes=PDE_MODES)
        written += stage_reconstruct(cfg)
        written += stage_evaluate(cfg)
        return written
    raise ConfigError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
