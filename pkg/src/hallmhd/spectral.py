"""Periodic-box spectral primitives: grid, transforms, derivatives, dealiasing.

All other modules route through the conventions fixed here:

* forward transform   f_hat = fftn(f) * (L/n)**3
  so the zero mode equals the spatial mean times the box volume L**3;
* inverse transform   f = Re[ifftn(f_hat)] * (n/L)**3;
* Plancherel          ||f||_L2**2 = sum(|f_hat|**2) / L**3,
  which matches the physical-space sum of |f|**2 * (L/n)**3 exactly
  (discrete Parseval);
* derivative wavenumber tables zero the Nyquist mode (odd-order
  derivatives are not well defined there) and every operator in this
  module uses the zeroed tables, so compositions commute on all modes.

Fields are immutable values once constructed; all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PHYSICAL = "physical"
SPECTRAL = "spectral"


class RepresentationError(ValueError):
    """A field was supplied in the wrong representation for an operation."""


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Cubic periodic box [0, L)^3 sampled on n points per axis.

    ``wavenumbers`` is the true per-axis table (2*pi/L)*m for
    m in {0, 1, ..., n/2-1, -n/2, ..., -1}, Nyquist included.
    ``kx, ky, kz`` are the broadcastable derivative tables with the
    Nyquist entry zeroed.
    """

    n: int
    box_length: float
    modes: np.ndarray         # (n,) integer mode numbers, fft layout
    wavenumbers: np.ndarray   # (n,) physical wavenumbers, Nyquist kept
    kx: np.ndarray            # (n,1,1) derivative table, Nyquist zeroed
    ky: np.ndarray            # (1,n,1)
    kz: np.ndarray            # (1,1,n)
    k_sq: np.ndarray          # (n,n,n) |xi|^2 from the derivative tables
    k_abs: np.ndarray         # (n,n,n) |xi|
    inv_k_sq: np.ndarray      # (n,n,n) 1/|xi|^2, zero where |xi| = 0
    dealias_mask: np.ndarray  # (n,n,n) bool, 2/3 rule
    x: np.ndarray             # (n,) axis coordinates

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def volume(self) -> float:
        return self.box_length ** 3

    @property
    def cell_volume(self) -> float:
        return self.dx ** 3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical coordinate arrays X, Y, Z with 'ij' indexing."""
        return np.meshgrid(self.x, self.x, self.x, indexing="ij")


def build_grid(n: int, box_length: float) -> SpectralGrid:
    """Build the periodic-box discretization.

    Requires n >= 8 and a power of two, box_length > 0.
    """
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size n={n} must be a power of two >= 8")
    if not box_length > 0:
        raise ValueError(f"box_length={box_length} must be positive")

    modes = np.fft.fftfreq(n, d=1.0 / n).astype(int)          # 0..n/2-1, -n/2..-1
    wavenumbers = (2.0 * np.pi / box_length) * modes
    deriv = wavenumbers.copy()
    deriv[n // 2] = 0.0                                       # Nyquist zeroed

    kx = deriv.reshape(n, 1, 1)
    ky = deriv.reshape(1, n, 1)
    kz = deriv.reshape(1, 1, n)
    k_sq = kx ** 2 + ky ** 2 + kz ** 2
    k_abs = np.sqrt(k_sq)
    with np.errstate(divide="ignore"):
        inv_k_sq = np.where(k_sq > 0.0, 1.0 / np.where(k_sq > 0.0, k_sq, 1.0), 0.0)

    keep = np.abs(modes) <= n / 3.0
    dealias_mask = (
        keep.reshape(n, 1, 1) & keep.reshape(1, n, 1) & keep.reshape(1, 1, n)
    )
    x = box_length * np.arange(n) / n
    return SpectralGrid(
        n=n,
        box_length=float(box_length),
        modes=modes,
        wavenumbers=wavenumbers,
        kx=kx,
        ky=ky,
        kz=kz,
        k_sq=k_sq,
        k_abs=k_abs,
        inv_k_sq=inv_k_sq,
        dealias_mask=dealias_mask,
        x=x,
    )


# ---------------------------------------------------------------------------
# raw-array transforms (shared by the field wrappers and the hot loops)


def forward_array(grid: SpectralGrid, values: np.ndarray) -> np.ndarray:
    """fftn over the last three axes, scaled by the cell volume."""
    return np.fft.fftn(values, axes=(-3, -2, -1)) * grid.cell_volume


def inverse_array(grid: SpectralGrid, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of forward_array.

    Callers supply Hermitian-symmetric data (everything in this package
    preserves that symmetry); the round-off imaginary residue is dropped.
    """
    z = np.fft.ifftn(coeffs, axes=(-3, -2, -1)) * (1.0 / grid.cell_volume)
    return np.ascontiguousarray(z.real)


# ---------------------------------------------------------------------------
# field containers


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One scalar unknown on a grid, tagged physical or spectral."""

    grid: SpectralGrid
    representation: str
    data: np.ndarray  # (n,n,n); real if physical, complex if spectral

    @classmethod
    def from_physical(cls, grid: SpectralGrid, data: np.ndarray) -> "ScalarField":
        return cls(grid, PHYSICAL, np.asarray(data, dtype=float))

    @classmethod
    def from_spectral(cls, grid: SpectralGrid, data: np.ndarray) -> "ScalarField":
        return cls(grid, SPECTRAL, np.asarray(data, dtype=complex))

    @classmethod
    def zeros(cls, grid: SpectralGrid, representation: str = SPECTRAL) -> "ScalarField":
        dtype = complex if representation == SPECTRAL else float
        return cls(grid, representation, np.zeros(grid.shape, dtype=dtype))

    def to_spectral(self) -> "ScalarField":
        return self if self.representation == SPECTRAL else transform(self, "forward")

    def to_physical(self) -> "ScalarField":
        return self if self.representation == PHYSICAL else transform(self, "inverse")


@dataclass(frozen=True, eq=False)
class VectorField:
    """Three-component field, data stacked as (3, n, n, n)."""

    grid: SpectralGrid
    representation: str
    data: np.ndarray

    @classmethod
    def from_physical(cls, grid: SpectralGrid, data: np.ndarray) -> "VectorField":
        return cls(grid, PHYSICAL, np.asarray(data, dtype=float))

    @classmethod
    def from_spectral(cls, grid: SpectralGrid, data: np.ndarray) -> "VectorField":
        return cls(grid, SPECTRAL, np.asarray(data, dtype=complex))

    @classmethod
    def zeros(cls, grid: SpectralGrid, representation: str = SPECTRAL) -> "VectorField":
        dtype = complex if representation == SPECTRAL else float
        return cls(grid, representation, np.zeros((3,) + grid.shape, dtype=dtype))

    def to_spectral(self) -> "VectorField":
        return self if self.representation == SPECTRAL else transform(self, "forward")

    def to_physical(self) -> "VectorField":
        return self if self.representation == PHYSICAL else transform(self, "inverse")


Field = ScalarField | VectorField


def _require(field: Field, representation: str, what: str) -> None:
    if field.representation != representation:
        raise RepresentationError(
            f"{what} needs a {representation} field, got {field.representation}"
        )


def transform(field: Field, direction: str):
    """Forward (physical -> spectral) or inverse (spectral -> physical)."""
    cls = type(field)
    if direction == "forward":
        _require(field, PHYSICAL, "forward transform")
        return cls(field.grid, SPECTRAL, forward_array(field.grid, field.data))
    if direction == "inverse":
        _require(field, SPECTRAL, "inverse transform")
        return cls(field.grid, PHYSICAL, inverse_array(field.grid, field.data))
    raise ValueError(f"unknown transform direction {direction!r}")


# ---------------------------------------------------------------------------
# spectral differential operators (diagonal multipliers)


def gradient(field: ScalarField) -> VectorField:
    _require(field, SPECTRAL, "gradient")
    g = field.grid
    f = field.data
    out = np.stack([1j * g.kx * f, 1j * g.ky * f, 1j * g.kz * f])
    return VectorField.from_spectral(g, out)


def divergence(field: VectorField) -> ScalarField:
    _require(field, SPECTRAL, "divergence")
    g = field.grid
    v = field.data
    return ScalarField.from_spectral(
        g, 1j * (g.kx * v[0] + g.ky * v[1] + g.kz * v[2])
    )


def curl(field: VectorField) -> VectorField:
    _require(field, SPECTRAL, "curl")
    g = field.grid
    v = field.data
    out = np.stack(
        [
            1j * (g.ky * v[2] - g.kz * v[1]),
            1j * (g.kz * v[0] - g.kx * v[2]),
            1j * (g.kx * v[1] - g.ky * v[0]),
        ]
    )
    return VectorField.from_spectral(g, out)


def laplacian(field: Field):
    _require(field, SPECTRAL, "laplacian")
    return type(field)(field.grid, SPECTRAL, -field.grid.k_sq * field.data)


def nabla_power(field: Field, k: int):
    """|xi|^k Fourier multiplier; its Plancherel norm is the order-k seminorm."""
    if k not in (0, 1, 2, 3, 4):
        raise ValueError(f"nabla^k supports k in 0..4, got {k}")
    _require(field, SPECTRAL, "nabla^k")
    if k == 0:
        return field
    return type(field)(field.grid, SPECTRAL, field.grid.k_abs ** k * field.data)


def spectral_derivative(field: Field, op: str, k: int | None = None):
    """Dispatch by operator name: gradient|divergence|curl|laplacian|nabla^k."""
    if op == "gradient":
        return gradient(field)
    if op == "divergence":
        return divergence(field)
    if op == "curl":
        return curl(field)
    if op == "laplacian":
        return laplacian(field)
    if op == "nabla^k":
        if k is None:
            raise ValueError("nabla^k requires the order k")
        return nabla_power(field, k)
    raise ValueError(f"unknown derivative operator {op!r}")


def dealias(field: Field):
    """Zero every mode outside the 2/3-rule mask. Idempotent."""
    _require(field, SPECTRAL, "dealias")
    return type(field)(field.grid, SPECTRAL, field.data * field.grid.dealias_mask)


def project_divergence_free(field: VectorField) -> VectorField:
    """Remove the gradient part: v - xi (xi . v)/|xi|^2, zero mode kept."""
    _require(field, SPECTRAL, "divergence-free projection")
    g = field.grid
    v = field.data
    kdotv = g.kx * v[0] + g.ky * v[1] + g.kz * v[2]
    corr = kdotv * g.inv_k_sq
    out = np.stack([v[0] - g.kx * corr, v[1] - g.ky * corr, v[2] - g.kz * corr])
    return VectorField.from_spectral(g, out)


def divergence_defect(field: VectorField) -> float:
    """max |xi . v_hat| / max |v_hat| over modes (0 for the zero field)."""
    _require(field, SPECTRAL, "divergence defect")
    g = field.grid
    v = field.data
    kdotv = g.kx * v[0] + g.ky * v[1] + g.kz * v[2]
    scale = np.max(np.abs(v))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(kdotv)) / scale)


# ---------------------------------------------------------------------------
# Plancherel helpers (the single routing point for every norm)


def l2_norm_sq(field: Field) -> float:
    """Squared L2 norm via the Plancherel sum, any representation."""
    if field.representation == SPECTRAL:
        return float(np.sum(np.abs(field.data) ** 2)) / field.grid.volume
    return float(np.sum(field.data ** 2)) * field.grid.cell_volume


def l2_norm(field: Field) -> float:
    return np.sqrt(l2_norm_sq(field))


def l2_inner(a: Field, b: Field) -> float:
    """Real L2 inner product of two fields in matching representation."""
    if a.representation != b.representation:
        raise RepresentationError("inner product needs matching representations")
    if a.representation == SPECTRAL:
        return float(np.sum(np.conj(a.data) * b.data).real) / a.grid.volume
    return float(np.sum(a.data * b.data)) * a.grid.cell_volume


def sobolev_seminorm_sq(field: Field, k: int) -> float:
    """Squared order-k seminorm: Plancherel sum of |xi|^{2k} |f_hat|^2."""
    if k < 0 or k > 4:
        raise ValueError(f"seminorm order k={k} outside the supported range 0..4")
    f = field.to_spectral()
    w = 1.0 if k == 0 else f.grid.k_sq ** k
    return float(np.sum(w * np.abs(f.data) ** 2)) / f.grid.volume


def sobolev_norm_sq(field: Field, m: int) -> float:
    """Squared full H^m norm: sum of the squared seminorms of order 0..m."""
    return sum(sobolev_seminorm_sq(field, k) for k in range(m + 1))
