import numpy as np
import pytest

from dynact.errors import MismatchError
from dynact.metrics import evaluate, masked_rmse
from dynact.phantom import Ellipse, PhantomSpec
from dynact.reconstruct import Image, ImageSpec


def img(values, nx=8, ny=8):
    return Image(ImageSpec(nx=nx, ny=ny), np.asarray(values, dtype=float))


def test_identical_images():
    a = img(np.random.default_rng(0).uniform(0, 1, (8, 8)))
    rep = evaluate(a, a)
    assert rep.rmse == 0.0
    assert np.isposinf(rep.psnr)
    assert rep.to_dict()["psnr"] == "inf"


def test_constant_vs_zero():
    a = img(np.full((8, 8), 0.3))
    b = img(np.zeros((8, 8)))
    rep = evaluate(a, b)
    assert rep.rmse == pytest.approx(0.3, abs=1e-15)
    assert rep.relative_l2 == float("inf")


def test_checkerboard_rmse_one():
    v = np.indices((8, 8)).sum(axis=0) % 2
    a = img(np.where(v, 1.0, -1.0))
    b = img(np.zeros((8, 8)))
    assert evaluate(a, b).rmse == pytest.approx(1.0, abs=1e-15)


def test_psnr_value():
    b = np.zeros((8, 8))
    b[0, 0] = 2.0  # range 2
    a = b + 0.1
    rep = evaluate(img(a), img(b))
    assert rep.psnr == pytest.approx(20 * np.log10(2.0 / 0.1), abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(MismatchError):
        evaluate(img(np.zeros((8, 8))), img(np.zeros((9, 9)), nx=9, ny=9))


def test_region_rmse_uses_labels():
    phantom = PhantomSpec(
        [
            Ellipse(center=(0, 0), semi_axes=(0.9, 0.9), density=1.0, label="body"),
            Ellipse(center=(0.3, 0.3), semi_axes=(0.2, 0.2), density=0.5, label="tumour"),
            Ellipse(center=(-0.4, 0.0), semi_axes=(0.2, 0.3), density=-0.5, label="lung"),
            Ellipse(center=(0.4, -0.4), semi_axes=(0.1, 0.1), density=-0.5, label="lung"),
        ]
    )
    spec = ImageSpec(nx=65, ny=65)
    b = Image(spec, np.zeros((65, 65)))
    vals = np.zeros((65, 65))
    pts = spec.pixel_points()
    tum = phantom.ellipses[1].contains(pts)
    vals[tum] = 0.2
    rep = evaluate(Image(spec, vals), b, phantom)
    assert set(rep.region_rmse) == {"tumour", "lung"}
    assert rep.region_rmse["tumour"] == pytest.approx(0.2, abs=1e-12)
    assert rep.region_rmse["lung"] == 0.0


def test_masked_rmse():
    a = img(np.ones((8, 8)))
    b = img(np.zeros((8, 8)))
    mask = np.zeros((8, 8), dtype=bool)
    mask[:4] = True
    assert masked_rmse(a, b, mask) == pytest.approx(1.0, abs=1e-15)
