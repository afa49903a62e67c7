"""Platform-stable seeded random draws.

A splitmix64 counter stream feeding Box-Muller; pure 64-bit integer and
float64 numpy ops, so identical seeds give bit-identical draws on every
platform and numpy version. The draw order (C-order over the requested
shape, two uniforms per normal pair) is part of the reproducibility
contract of perturbed boundary data.
"""

from __future__ import annotations

import numpy as np

_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_MULT2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (x + _GOLDEN).astype(np.uint64)
        z = (z ^ (z >> np.uint64(30))) * _MULT1
        z = (z ^ (z >> np.uint64(27))) * _MULT2
        return z ^ (z >> np.uint64(31))


class StableRng:
    """Counter-based generator; draws never depend on chunking."""

    def __init__(self, seed: int):
        self._base = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        self._counter = np.uint64(0)

    def _raw(self, n: int) -> np.ndarray:
        with np.errstate(over="ignore"):
            idx = self._counter + np.arange(n, dtype=np.uint64)
            self._counter += np.uint64(n)
            return _splitmix64(self._base + idx)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles strictly inside (0, 1)."""
        bits = self._raw(n) >> np.uint64(11)
        return (bits.astype(np.float64) + 0.5) * 2.0 ** -53

    def normals(self, shape) -> np.ndarray:
        """Standard normal draws via Box-Muller, C-order over shape."""
        n = int(np.prod(shape, dtype=np.int64)) if np.ndim(shape) else int(shape)
        pairs = (n + 1) // 2
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        ang = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(ang)
        out[1::2] = r * np.sin(ang)
        return out[:n].reshape(shape)
