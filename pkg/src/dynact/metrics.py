"""Image-quality metrics against the rasterized ground truth.

These are artifact metrics for regression and comparison purposes; they
are not published reference numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MismatchError
from .phantom import PhantomSpec
from .reconstruct import Image


@dataclass
class MetricsReport:
    rmse: float
    relative_l2: float
    psnr: float
    region_rmse: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(v: float):
            if np.isposinf(v):
                return "inf"
            if np.isneginf(v):
                return "-inf"
            return float(v)

        return {
            "rmse": enc(self.rmse),
            "relative_l2": enc(self.relative_l2),
            "psnr": enc(self.psnr),
            "region_rmse": {k: enc(v) for k, v in self.region_rmse.items()},
        }


def region_masks(spec: PhantomSpec, points: np.ndarray) -> dict[str, np.ndarray]:
    """Union membership mask per non-body label ('lung' may repeat)."""
    masks: dict[str, np.ndarray] = {}
    for e in spec.ellipses:
        if not e.label or e.label == "body":
            continue
        m = e.contains(points)
        masks[e.label] = m | masks[e.label] if e.label in masks else m
    return masks


def evaluate(recon: Image, reference: Image, phantom: PhantomSpec | None = None) -> MetricsReport:
    """RMSE, relative l2, PSNR, and per-region RMSE of recon vs reference."""
    if recon.values.shape != reference.values.shape:
        raise MismatchError(
            f"image dimensions differ: {recon.values.shape} vs {reference.values.shape}"
        )
    a = recon.values
    b = reference.values
    diff = a - b
    rmse = float(np.sqrt(np.mean(diff ** 2)))
    norm_b = float(np.linalg.norm(b))
    relative_l2 = float(np.linalg.norm(diff) / norm_b) if norm_b > 0 else float("inf")
    rng = float(b.max() - b.min())
    if rmse == 0.0:
        psnr = float("inf")
    elif rng == 0.0:
        psnr = float("-inf")
    else:
        psnr = float(20.0 * np.log10(rng / rmse))

    region_rmse: dict[str, float] = {}
    if phantom is not None:
        pts = reference.spec.pixel_points()
        for name, mask in region_masks(phantom, pts).items():
            if mask.any():
                region_rmse[name] = float(np.sqrt(np.mean(diff[mask] ** 2)))
    return MetricsReport(rmse=rmse, relative_l2=relative_l2, psnr=psnr, region_rmse=region_rmse)


def masked_rmse(recon: Image, reference: Image, mask: np.ndarray) -> float:
    if recon.values.shape != reference.values.shape or mask.shape != recon.values.shape:
        raise MismatchError("image/mask dimensions differ")
    diff = recon.values[mask] - reference.values[mask]
    return float(np.sqrt(np.mean(diff ** 2)))
