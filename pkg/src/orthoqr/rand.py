"""Deterministic random streams for the matrix generators.

Streams are counter-based (Philox, 64-bit seed) and normal variates are
produced by the Box-Muller transform on top of the uniform stream, so a
generator's output is a pure function of (seed, draw order).
"""

import numpy as np


def make_rng(seed):
    """Generator over a Philox counter keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def standard_normal(rng, shape):
    """N(0,1) samples via Box-Muller."""
    if np.isscalar(shape):
        shape = (shape,)
    n = int(np.prod(shape)) if shape else 1
    if n == 0:
        return np.zeros(shape)
    half = (n + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # u1 in [0,1) so log1p(-u1) is finite
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    return z.reshape(shape)


def normal_matrix(rng, rows, cols, field="real"):
    """Dense Gaussian matrix; complex entries are (x + iy)/sqrt(2)."""
    if field == "real":
        return standard_normal(rng, (rows, cols))
    if field == "complex":
        re = standard_normal(rng, (rows, cols))
        im = standard_normal(rng, (rows, cols))
        return (re + 1j * im) / np.sqrt(2.0)
    raise ValueError(f"unknown field {field!r}")


def uniform(rng, low, high, size=None):
    """Uniform samples on [low, high)."""
    return low + (high - low) * rng.random(size)
