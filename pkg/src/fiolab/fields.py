"""Uniform grids, complex fields, norms, multipliers, dilation and field I/O.

Grids are periodic-convention uniform boxes: points x_i = -extent + i * h
with h = 2 * extent / points_per_axis (right endpoint excluded), so that the
trapezoid rule is a plain Riemann sum and the FFT lattice matches the grid.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .util import ConfigurationError, DomainError, japanese_bracket

_MAGIC = b"FIOLAB01"
_HEADER = struct.Struct("<8sii d 8x")  # magic, n, points_per_axis, extent; 32 bytes


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular sampling of [-extent, extent)^n."""

    n: int
    extent: float
    points_per_axis: int
    max_points: int = 2**24

    def __post_init__(self):
        if self.extent <= 0 or self.points_per_axis <= 0:
            raise DomainError("grid extent and point count must be positive")
        if self.points_per_axis**self.n > self.max_points:
            raise DomainError(
                "grid of %d^%d points exceeds the memory ceiling %d"
                % (self.points_per_axis, self.n, self.max_points))

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.n

    def axis(self, center: float = 0.0) -> np.ndarray:
        return center - self.extent + self.spacing * np.arange(self.points_per_axis)

    def axes(self, center=None):
        center = np.zeros(self.n) if center is None else np.asarray(center, float)
        return [self.axis(center[i]) for i in range(self.n)]

    def points(self, center=None) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(center), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def frequency_axes(self):
        """Angular-frequency lattice of the FFT on this grid."""
        return [2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)
                for _ in range(self.n)]


@dataclass
class Field:
    """Complex values sampled on a grid; optionally centered off the origin."""

    grid: Grid
    values: np.ndarray
    center: np.ndarray = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise DomainError("field shape %s does not match grid %s"
                              % (self.values.shape, self.grid.shape))
        if self.center is None:
            self.center = np.zeros(self.grid.n)
        self.center = np.asarray(self.center, float)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.center.copy())


def field_from_function(grid: Grid, fn, center=None) -> Field:
    mesh = np.meshgrid(*grid.axes(center), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    return Field(grid, np.asarray(fn(pts), dtype=np.complex128), center=center)


def lp_norm(f: Field, p: float) -> float:
    if p < 1:
        raise DomainError("L^p norms require p >= 1")
    return float(np.sum(np.abs(f.values) ** p) * f.grid.cell_volume) ** (1.0 / p)


def tail_mass(f: Field, fraction: float = 0.8) -> float:
    """|f| mass outside ``fraction`` of the grid extent; a truncation diagnostic."""
    mesh = np.meshgrid(*f.grid.axes(f.center), indexing="ij")
    pts = np.stack(mesh, axis=-1) - f.center
    outside = np.max(np.abs(pts), axis=-1) > fraction * f.grid.extent
    total = np.sum(np.abs(f.values)) * f.grid.cell_volume
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(f.values[outside])) * f.grid.cell_volume / total)


def weight_multiply(f: Field, s: float) -> Field:
    mesh = np.meshgrid(*f.grid.axes(f.center), indexing="ij")
    w = japanese_bracket(np.stack(mesh, axis=-1)) ** s
    return Field(f.grid, f.values * w, f.center)


def bessel_multiply(f: Field, sigma: float) -> Field:
    """(1 - Laplacian)^(sigma/2) through the discrete frequency lattice."""
    spec = np.fft.fftn(f.values)
    axes = f.grid.frequency_axes()
    mesh = np.meshgrid(*axes, indexing="ij")
    mult = (1.0 + sum(m * m for m in mesh)) ** (sigma / 2.0)
    return Field(f.grid, np.fft.ifftn(spec * mult), f.center)


def sobolev_norm(f: Field, sigma: float, s: float, p: float) -> float:
    return lp_norm(weight_multiply(bessel_multiply(f, sigma), s), p)


def dilate(f: Field, lam: float) -> Field:
    """U_lam f(x) = f(lam x), resampled by separable cubic interpolation."""
    if lam == 0.0:
        raise DomainError("dilation factor must be nonzero")
    grid = f.grid
    idx = np.arange(grid.points_per_axis)
    # index coordinates of lam * x on the source grid
    coord_1d = (lam * (idx * grid.spacing - grid.extent) + grid.extent) / grid.spacing
    mesh = np.meshgrid(*([coord_1d] * grid.n), indexing="ij")
    coords = np.stack(mesh, axis=0)
    re = ndimage.map_coordinates(f.values.real, coords, order=3, mode="constant")
    im = ndimage.map_coordinates(f.values.imag, coords, order=3, mode="constant")
    return Field(grid, re + 1j * im, f.center)


def save_field(f: Field, path) -> None:
    """Flat binary field file plus a JSON sidecar; bit-exact round trip."""
    header = _HEADER.pack(_MAGIC, f.grid.n, f.grid.points_per_axis, f.grid.extent)
    data = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)
    sidecar = {
        "magic": _MAGIC.decode(),
        "n": f.grid.n,
        "points_per_axis": f.grid.points_per_axis,
        "extent": f.grid.extent,
        "center": list(map(float, f.center)),
        "dtype": "complex128-le",
        "order": "C",
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_field(path) -> Field:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, n, ppa, extent = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise ConfigurationError("not a field file: bad magic %r" % magic)
        data = fh.read()
    values = np.frombuffer(data, dtype="<c16").reshape((ppa,) * n).copy()
    center = None
    try:
        with open(str(path) + ".json") as fh:
            center = json.load(fh).get("center")
    except FileNotFoundError:
        pass
    return Field(Grid(n=n, extent=extent, points_per_axis=ppa), values, center=center)
