"""Deformation providers: one interface for "where is particle x at time t".

The reconstructor only needs Phi_t evaluated at pixel positions. The
analytic provider wraps a motion model directly; the field provider
interpolates a solved displacement history (bilinear in space on the
nominal lattice, linear in time between snapshots) and extends it
outside the solver domain by the value at the closest boundary point,
so it is total and continuous on the whole image extent.
"""

from __future__ import annotations

import numpy as np

from .domain import EllipseDomain
from .elastic import DisplacementHistory
from .errors import ConfigError
from .grid import NodeKind


class AnalyticDeformation:
    """Exact motion: eval(t, x) = phi(t, x)."""

    def __init__(self, motion):
        self.motion = motion

    def eval(self, t: float, points: np.ndarray) -> np.ndarray:
        return self.motion.phi(t, points)


def _bilinear(xc: np.ndarray, yc: np.ndarray, field: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Sample (nx, ny, 2) lattice field at (..., 2) points, clamped at edges."""
    px = pts[..., 0]
    py = pts[..., 1]
    ix = np.clip(np.searchsorted(xc, px, side="right") - 1, 0, len(xc) - 2)
    iy = np.clip(np.searchsorted(yc, py, side="right") - 1, 0, len(yc) - 2)
    fx = np.clip((px - xc[ix]) / (xc[ix + 1] - xc[ix]), 0.0, 1.0)
    fy = np.clip((py - yc[iy]) / (yc[iy + 1] - yc[iy]), 0.0, 1.0)
    f00 = field[ix, iy]
    f10 = field[ix + 1, iy]
    f01 = field[ix, iy + 1]
    f11 = field[ix + 1, iy + 1]
    wx = fx[..., None]
    wy = fy[..., None]
    return (1 - wx) * ((1 - wy) * f00 + wy * f01) + wx * ((1 - wy) * f10 + wy * f11)


class FieldDeformation:
    """Deformation backed by a solved displacement history.

    Snapshot fields are first completed on the nominal lattice: nodes
    outside the solver domain take the boundary displacement at their
    closest boundary point (interpolated in arc-length between boundary
    nodes), which realizes the clamped continuous extension.
    """

    def __init__(self, history: DisplacementHistory):
        grid = history.grid
        domain = grid.domain
        if not isinstance(domain, EllipseDomain):
            raise ConfigError("field deformation requires an elliptic solver domain")
        self.grid = grid
        self.times = np.asarray(history.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("snapshot times must be strictly ascending")
        self.xc = grid.x_coords
        self.yc = grid.y_coords

        kind = grid.kind
        outside = (kind == int(NodeKind.EXTERIOR)) | (kind == int(NodeKind.GHOST))
        out_ij = np.argwhere(outside)
        X, Y = np.meshgrid(self.xc, self.yc, indexing="ij")
        out_pts = np.stack([X[out_ij[:, 0], out_ij[:, 1]], Y[out_ij[:, 0], out_ij[:, 1]]], axis=-1)

        b_ij = grid.boundary_ij
        b_pos = grid.boundary_positions()
        s_b = domain.arclength_of_angle(domain.param_angle(b_pos))
        order = np.argsort(s_b, kind="stable")
        s_sorted = s_b[order]
        perimeter = domain.perimeter()

        if len(out_ij):
            closest = domain.closest_boundary_points(out_pts)
            s_out = domain.arclength_of_angle(domain.param_angle(closest))
            s_ext = np.concatenate([s_sorted, [s_sorted[0] + perimeter]])
            q = np.where(s_out < s_sorted[0], s_out + perimeter, s_out)
            seg = np.clip(np.searchsorted(s_ext, q, side="right") - 1, 0, len(s_sorted) - 1)
            w = (q - s_ext[seg]) / (s_ext[seg + 1] - s_ext[seg])

        filled = np.array(history.fields, dtype=float)
        for k in range(len(self.times)):
            if len(out_ij) == 0:
                break
            bvals = filled[k][b_ij[:, 0], b_ij[:, 1]][order]  # (B, 2) sorted by arc-length
            bvals_ext = np.concatenate([bvals, bvals[:1]], axis=0)
            ext = (1.0 - w)[:, None] * bvals_ext[seg] + w[:, None] * bvals_ext[seg + 1]
            filled[k][out_ij[:, 0], out_ij[:, 1]] = ext
        self.fields = filled

    def displacement(self, t: float, points: np.ndarray) -> np.ndarray:
        """Interpolated displacement u(t, x); t clamped to the snapshot range."""
        times = self.times
        pts = np.asarray(points, dtype=float)
        if t <= times[0]:
            return _bilinear(self.xc, self.yc, self.fields[0], pts)
        if t >= times[-1]:
            return _bilinear(self.xc, self.yc, self.fields[-1], pts)
        k = int(np.searchsorted(times, t, side="right")) - 1
        w = (t - times[k]) / (times[k + 1] - times[k])
        # blending the small lattice arrays first halves the gather cost
        blended = (1.0 - w) * self.fields[k] + w * self.fields[k + 1]
        return _bilinear(self.xc, self.yc, blended, pts)

    def eval(self, t: float, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) + self.displacement(t, points)
