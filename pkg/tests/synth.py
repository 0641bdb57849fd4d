"""Band-limited trigonometric test fields, grid-independent by construction.

Fields are explicit sums of cosine modes, so the same draw can be sampled
on grids of different resolution and compared against finite-difference
oracles without any FFT in the loop.
"""

import numpy as np


def draw_scalar_modes(rng, mmax=2, nmodes=6, scale=1.0):
    """List of (integer mode vector, amplitude, phase)."""
    modes = []
    while len(modes) < nmodes:
        m = rng.integers(-mmax, mmax + 1, size=3)
        if not m.any():
            continue
        modes.append((m.copy(), float(rng.normal() * scale),
                      float(rng.uniform(0, 2 * np.pi))))
    return modes


def draw_solenoidal_modes(rng, mmax=2, nmodes=6, scale=1.0):
    """Modes with amplitude vectors orthogonal to the wavevector."""
    modes = []
    while len(modes) < nmodes:
        m = rng.integers(-mmax, mmax + 1, size=3)
        if not m.any():
            continue
        a = rng.normal(size=3) * scale
        mf = m.astype(float)
        a = a - mf * (mf @ a) / (mf @ mf)
        modes.append((m.copy(), a, float(rng.uniform(0, 2 * np.pi))))
    return modes


def sample_scalar(grid, modes):
    X, Y, Z = grid.meshgrid()
    kunit = 2 * np.pi / grid.box_length
    f = np.zeros(grid.shape)
    for m, amp, phase in modes:
        f += amp * np.cos(kunit * (m[0] * X + m[1] * Y + m[2] * Z) + phase)
    return f


def sample_vector(grid, modes):
    X, Y, Z = grid.meshgrid()
    kunit = 2 * np.pi / grid.box_length
    v = np.zeros((3,) + grid.shape)
    for m, a, phase in modes:
        c = np.cos(kunit * (m[0] * X + m[1] * Y + m[2] * Z) + phase)
        for j in range(3):
            v[j] += a[j] * c
    return v
