"""Second-order centered finite-difference evaluation of the full RHS.

Completely independent of the spectral path: periodic rolls for every
derivative, pointwise coefficient algebra inlined, no FFT and no
dealiasing.  Serves as the cross-check oracle for the pseudo-spectral
right-hand side at observed order 2 in the grid spacing.
"""

import numpy as np


def ddx(f, h, axis):
    return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2.0 * h)


def grad(f, h):
    return np.stack([ddx(f, h, 0), ddx(f, h, 1), ddx(f, h, 2)])


def div(v, h):
    return ddx(v[0], h, 0) + ddx(v[1], h, 1) + ddx(v[2], h, 2)


def lap(f, h):
    out = np.zeros_like(f)
    for axis in range(f.ndim - 3, f.ndim):
        out = out + (np.roll(f, -1, axis) + np.roll(f, 1, axis) - 2.0 * f) / h ** 2
    return out


def curl(v, h):
    return np.stack([
        ddx(v[2], h, 1) - ddx(v[1], h, 2),
        ddx(v[0], h, 2) - ddx(v[2], h, 0),
        ddx(v[1], h, 0) - ddx(v[0], h, 1),
    ])


def advect(v, w, h):
    """(v . grad) w componentwise."""
    return np.stack([np.einsum("i...,i...->...", v, grad(w[c], h))
                     for c in range(3)])


def lorentz(B, h):
    """B.grad B - (1/2) grad |B|^2."""
    return advect(B, B, h) - 0.5 * grad(np.einsum("i...,i...->...", B, B), h)


def hall_curl(rho, B, h):
    g = 1.0 / (rho + 1.0)
    return curl(g * lorentz(B, h), h)


def s3(rho, u, B, h, hall=True):
    out = -advect(u, B, h) + advect(B, u, h) - B * div(u, h)
    if hall:
        out = out - hall_curl(rho, B, h)
    return out


def full_rhs(rho, u, B, h, mu, nu, gamma, hall=True):
    """(d rho, d u, d B) of the perturbation system on physical samples."""
    rho_tot = rho + 1.0
    hcoef = rho / rho_tot
    fcoef = rho_tot ** (gamma - 2.0) - 1.0
    gcoef = 1.0 / rho_tot

    div_u = div(u, h)
    grad_rho = grad(rho, h)

    s1 = -rho * div_u - np.einsum("i...,i...->...", u, grad_rho)
    visc = mu * lap(u, h) + (mu + nu) * grad(div_u, h)
    s2 = -advect(u, u, h) - hcoef * visc - fcoef * grad_rho + gcoef * lorentz(B, h)

    d_rho = -div_u + s1
    d_u = visc - grad_rho + s2
    d_B = lap(B, h) + s3(rho, u, B, h, hall=hall)
    return d_rho, d_u, d_B
