"""Explicit solver for linear elastodynamics on a classified grid.

Update rule (k = 1 component, k = 2 by exchanging x/y and u1/u2):

    u1(n+1) = dt^2/rho * v1(n) - u1(n-1)
      + 2*[1 - 2 dt^2/rho * (mu/DY2 + (lam+2mu)/DX2)] * u1(n)
      + dt^2/rho * 2(lam+2mu)/DX2 * [wxp*u1_E + wxm*u1_W]
      + dt^2/rho * 2mu/DY2        * [wyp*u1_N + wym*u1_S]
      + dt^2/rho * (lam+mu)/((hxr+hxl)(hyu+hyd)) * (u2_NE - u2_NW - u2_SE + u2_SW)

with DX2 = hxr^2 + hxl^2, wxp = 1 - (hxr-hxl)/(hxr+hxl), wxm the + variant,
and local spacings taken from the actual (snapped) node positions. The
first step folds the mirror rule u(-1) = u(1) - 2*dt*theta1 into the n=0
update. Dirichlet values are imposed at boundary nodes at every level and
ghost values are re-extrapolated from the current level before each step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InstabilityError
from .grid import Grid2D, NodeKind


@dataclass
class MaterialParams:
    lame_lambda: float = 3460.0
    lame_mu: float = 1480.0
    rho0: np.ndarray | None = None  # (nx, ny); required by the solver
    forcing: object | None = None  # callable t -> (nx, ny, 2), or None

    def validate(self):
        if not self.lame_mu > 0:
            raise ConfigError("mu must be positive")
        if not self.lame_lambda + 2.0 * self.lame_mu > 0:
            raise ConfigError("lambda + 2*mu must be positive")


@dataclass
class InitialData:
    theta0: np.ndarray  # (nx, ny, 2)
    theta1: np.ndarray  # (nx, ny, 2)

    @classmethod
    def zero(cls, shape: tuple[int, int]) -> "InitialData":
        return cls(np.zeros(shape + (2,)), np.zeros(shape + (2,)))


@dataclass
class DisplacementHistory:
    """Displacement snapshots u(t_k) on the solver grid."""

    times: np.ndarray  # (K,)
    fields: np.ndarray  # (K, nx, ny, 2)
    grid: Grid2D
    dt: float
    num_steps: int


def _min_rho(grid: Grid2D, rho0: np.ndarray) -> float:
    active = grid.kind != int(NodeKind.EXTERIOR)
    rho = np.asarray(rho0, dtype=float)
    if rho.shape != grid.shape:
        raise ConfigError(f"rho0 shape {rho.shape} != grid {grid.shape}")
    vals = rho[active]
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise ConfigError("rho0 must be positive and finite at all active nodes")
    return float(vals.min())


def cfl_dt(params: MaterialParams, grid: Grid2D, safety: float = 0.9) -> float:
    """Largest stable time step: safety / (nu * (1/dx_min + 1/dy_min)).

    nu = sqrt((lambda + 2 mu)/min rho0); minima run over all spacings of
    the snapped grid, so boundary cells shorten the step.
    """
    if not 0.0 < safety <= 1.0:
        raise ConfigError("cfl safety must be in (0, 1]")
    params.validate()
    if params.rho0 is None:
        raise ConfigError("rho0 is required")
    rho_min = _min_rho(grid, params.rho0)
    nu = np.sqrt((params.lame_lambda + 2.0 * params.lame_mu) / rho_min)
    dx, dy = grid.min_spacings()
    return float(safety / (nu * (1.0 / dx + 1.0 / dy)))


class ElasticModel:
    """Precomputed stepping context for one (grid, material, dt) triple."""

    def __init__(self, grid: Grid2D, params: MaterialParams, dt: float):
        params.validate()
        if params.rho0 is None:
            raise ConfigError("rho0 is required")
        _min_rho(grid, params.rho0)
        self.grid = grid
        self.params = params
        self.dt = float(dt)
        nx, ny = grid.shape
        self.nx, self.ny = nx, ny

        kind = grid.kind
        ii, jj = np.nonzero(kind == int(NodeKind.INTERIOR))
        self.int_ij = (ii, jj)
        flat = ii * ny + jj
        self.idx = flat
        self.idx_e = flat + ny
        self.idx_w = flat - ny
        self.idx_n = flat + 1
        self.idx_s = flat - 1
        self.idx_ne = flat + ny + 1
        self.idx_nw = flat - ny + 1
        self.idx_se = flat + ny - 1
        self.idx_sw = flat - ny - 1

        px = grid.pos[..., 0].ravel()
        py = grid.pos[..., 1].ravel()
        hxr = px[self.idx_e] - px[flat]
        hxl = px[flat] - px[self.idx_w]
        hyu = py[self.idx_n] - py[flat]
        hyd = py[flat] - py[self.idx_s]
        if np.any(hxr <= 0) or np.any(hxl <= 0) or np.any(hyu <= 0) or np.any(hyd <= 0):
            raise ConfigError("non-positive stencil spacing at an interior node")

        rho = np.asarray(params.rho0, dtype=float).ravel()[flat]
        lam = params.lame_lambda
        mu = params.lame_mu
        g = dt * dt / rho
        dx2 = hxr * hxr + hxl * hxl
        dy2 = hyu * hyu + hyd * hyd
        wxp = 1.0 - (hxr - hxl) / (hxr + hxl)
        wxm = 1.0 + (hxr - hxl) / (hxr + hxl)
        wyp = 1.0 - (hyu - hyd) / (hyu + hyd)
        wym = 1.0 + (hyu - hyd) / (hyu + hyd)

        self.g = g
        self.a1 = 2.0 * (1.0 - 2.0 * g * (mu / dy2 + (lam + 2 * mu) / dx2))
        self.ce1 = g * 2.0 * (lam + 2 * mu) / dx2 * wxp
        self.cw1 = g * 2.0 * (lam + 2 * mu) / dx2 * wxm
        self.cn1 = g * 2.0 * mu / dy2 * wyp
        self.cs1 = g * 2.0 * mu / dy2 * wym
        self.a2 = 2.0 * (1.0 - 2.0 * g * (mu / dx2 + (lam + 2 * mu) / dy2))
        self.ce2 = g * 2.0 * mu / dx2 * wxp
        self.cw2 = g * 2.0 * mu / dx2 * wxm
        self.cn2 = g * 2.0 * (lam + 2 * mu) / dy2 * wyp
        self.cs2 = g * 2.0 * (lam + 2 * mu) / dy2 * wym
        self.cx = g * (lam + mu) / ((hxr + hxl) * (hyu + hyd))

        b_ij = grid.boundary_ij
        self.bnd_flat = b_ij[:, 0] * ny + b_ij[:, 1]

        gt = grid.ghosts
        self.g_flat = gt.ghost[:, 0] * ny + gt.ghost[:, 1] if len(gt) else np.empty(0, dtype=int)
        self.g_n0 = gt.node0[:, 0] * ny + gt.node0[:, 1] if len(gt) else np.empty(0, dtype=int)
        self.g_n1 = gt.node1[:, 0] * ny + gt.node1[:, 1] if len(gt) else np.empty(0, dtype=int)
        self.g_n2 = gt.node2[:, 0] * ny + gt.node2[:, 1] if len(gt) else np.empty(0, dtype=int)
        self.g_fac = gt.factor

    def fill_ghosts_flat(self, u1: np.ndarray, u2: np.ndarray) -> None:
        if len(self.g_flat) == 0:
            return
        for comp, u in enumerate((u1, u2)):
            h0 = u[self.g_n0]
            h_aux = 0.5 * (u[self.g_n1] + u[self.g_n2])
            u[self.g_flat] = h0 + (h_aux - h0) * self.g_fac[:, comp]

    def _interior_rhs(self, u1, u2, v_int):
        """Full n-level part of the update (everything except -u(n-1)).

        Overflow to inf is tolerated here; the finiteness check after each
        step turns it into an InstabilityError.
        """
        r1 = (
            self.a1 * u1[self.idx]
            + self.ce1 * u1[self.idx_e]
            + self.cw1 * u1[self.idx_w]
            + self.cn1 * u1[self.idx_n]
            + self.cs1 * u1[self.idx_s]
            + self.cx
            * (u2[self.idx_ne] - u2[self.idx_nw] - u2[self.idx_se] + u2[self.idx_sw])
        )
        r2 = (
            self.a2 * u2[self.idx]
            + self.ce2 * u2[self.idx_e]
            + self.cw2 * u2[self.idx_w]
            + self.cn2 * u2[self.idx_n]
            + self.cs2 * u2[self.idx_s]
            + self.cx
            * (u1[self.idx_ne] - u1[self.idx_nw] - u1[self.idx_se] + u1[self.idx_sw])
        )
        if v_int is not None:
            r1 = r1 + self.g * v_int[0]
            r2 = r2 + self.g * v_int[1]
        return r1, r2

    def _forcing_at(self, t: float):
        if self.params.forcing is None:
            return None
        v = np.asarray(self.params.forcing(t), dtype=float)
        vr = v.reshape(-1, 2)
        return vr[self.idx, 0], vr[self.idx, 1]

    def _check_finite(self, r1, r2, step_no: int):
        bad1 = ~np.isfinite(r1)
        bad2 = ~np.isfinite(r2)
        if bad1.any() or bad2.any():
            k = int(np.argmax(bad1 | bad2))
            node = (int(self.int_ij[0][k]), int(self.int_ij[1][k]))
            raise InstabilityError(
                f"non-finite displacement at node {node}, step {step_no}; "
                "time step likely violates the CFL condition",
                step=step_no,
                node=node,
            )

    def step(self, u_prev: np.ndarray, u_cur: np.ndarray, psi_next: np.ndarray, t_cur: float, step_no: int) -> np.ndarray:
        """Advance one level. u_* are (nx, ny, 2) with current ghosts filled."""
        p1 = u_prev[..., 0].ravel()
        p2 = u_prev[..., 1].ravel()
        u1 = u_cur[..., 0].ravel()
        u2 = u_cur[..., 1].ravel()
        with np.errstate(over="ignore", invalid="ignore"):
            r1, r2 = self._interior_rhs(u1, u2, self._forcing_at(t_cur))
            n1 = r1 - p1[self.idx]
            n2 = r2 - p2[self.idx]
        self._check_finite(n1, n2, step_no)
        out = np.zeros_like(u_cur)
        o1 = out[..., 0].ravel()
        o2 = out[..., 1].ravel()
        o1[self.idx] = n1
        o2[self.idx] = n2
        o1[self.bnd_flat] = psi_next[:, 0]
        o2[self.bnd_flat] = psi_next[:, 1]
        self.fill_ghosts_flat(o1, o2)
        out[..., 0] = o1.reshape(self.nx, self.ny)
        out[..., 1] = o2.reshape(self.nx, self.ny)
        return out

    def first_step(self, initial: InitialData, psi1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Levels (u^0, u^1): mirror rule folded into the n=0 update.

        u^1 = dt*theta1 + (a1*u^0 + neighbor terms + dt^2/rho * v^0)/2,
        which equals theta0 + dt*theta1 + half the update increment.
        """
        u0 = np.array(initial.theta0, dtype=float)
        th1 = np.asarray(initial.theta1, dtype=float)
        u01 = u0[..., 0].ravel()
        u02 = u0[..., 1].ravel()
        self.fill_ghosts_flat(u01, u02)
        r1, r2 = self._interior_rhs(u01, u02, self._forcing_at(0.0))
        t1f = th1.reshape(-1, 2)
        n1 = self.dt * t1f[self.idx, 0] + 0.5 * r1
        n2 = self.dt * t1f[self.idx, 1] + 0.5 * r2
        self._check_finite(n1, n2, 1)
        out = np.zeros_like(u0)
        o1 = out[..., 0].ravel()
        o2 = out[..., 1].ravel()
        o1[self.idx] = n1
        o2[self.idx] = n2
        o1[self.bnd_flat] = psi1[:, 0]
        o2[self.bnd_flat] = psi1[:, 1]
        self.fill_ghosts_flat(o1, o2)
        out[..., 0] = o1.reshape(self.nx, self.ny)
        out[..., 1] = o2.reshape(self.nx, self.ny)
        u0[..., 0] = u01.reshape(self.nx, self.ny)
        u0[..., 1] = u02.reshape(self.nx, self.ny)
        return u0, out


def _boundary_evaluator(boundary, grid: Grid2D):
    if boundary is None:
        nb = len(grid.boundary_ij)
        return lambda t: np.zeros((nb, 2))
    if callable(boundary):
        return boundary
    return boundary.at_time


def solve(
    grid: Grid2D,
    params: MaterialParams,
    initial: InitialData | None,
    boundary,
    t_end: float,
    output_times,
    safety: float = 0.9,
) -> DisplacementHistory:
    """Run the explicit scheme to t_end and capture snapshots.

    ``boundary`` is a BoundaryData (or any ``t -> (B, 2)`` callable giving
    displacements at grid.boundary_ij order); ``output_times`` are mapped
    to the nearest completed step. dt is the CFL bound reduced so that
    t_end is an integer number of steps.
    """
    if t_end <= 0:
        raise ConfigError("t_end must be positive")
    if initial is None:
        initial = InitialData.zero(grid.shape)
    dt_max = cfl_dt(params, grid, safety)
    num_steps = int(np.ceil(t_end / dt_max - 1e-12))
    dt = t_end / num_steps
    model = ElasticModel(grid, params, dt)
    psi = _boundary_evaluator(boundary, grid)

    req = np.asarray(output_times, dtype=float)
    snap_steps = np.clip(np.rint(req / dt).astype(int), 0, num_steps)
    snap_times = snap_steps * dt
    fields = np.zeros((len(req), grid.nx, grid.ny, 2))

    # level 0: initial data with prescribed boundary and filled ghosts
    init0 = np.array(initial.theta0, dtype=float)
    b_ij = grid.boundary_ij
    init0[b_ij[:, 0], b_ij[:, 1]] = psi(0.0)
    u_prev, u_cur = model.first_step(InitialData(init0, initial.theta1), psi(dt))

    for k in np.nonzero(snap_steps == 0)[0]:
        fields[k] = u_prev
    for k in np.nonzero(snap_steps == 1)[0]:
        fields[k] = u_cur

    for n in range(1, num_steps):
        u_next = model.step(u_prev, u_cur, psi((n + 1) * dt), n * dt, n + 1)
        u_prev, u_cur = u_cur, u_next
        for k in np.nonzero(snap_steps == n + 1)[0]:
            fields[k] = u_cur

    return DisplacementHistory(times=snap_times, fields=fields, grid=grid, dt=dt, num_steps=num_steps)
