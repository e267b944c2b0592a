"""Quasi-static microwave magnetic fields of the filament model.

Each filament is an infinite line current along y, so the field at (x, z) is
the 2-D superposition B = sum_i mu0*I_i/(2*pi*r_i) circling filament i.
Fields are peak phasor amplitudes in gauss for a CW drive whose peak current
is I = sqrt(2*P/Z0). The distribution carries no frequency dependence: the
waveguide is far smaller than the wavelength everywhere in its band, which is
why the same map applies from tens of MHz to a few GHz.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import epsilon_0, mu_0

from .geometry import (
    DEFAULT_FILAMENTS_PER_STRIP,
    FilamentSet,
    Section,
    WaveguideGeometry,
    build_filaments,
    validate,
)

__all__ = [
    "DriveConditions",
    "FieldSample",
    "GridSpec",
    "FieldMap",
    "DepthProfile",
    "FieldSingularityError",
    "cpw_impedance",
    "effective_permittivity",
    "power_to_current",
    "b_field_at",
    "field_map",
    "line_scan",
    "depth_profile",
    "reflection_estimate",
    "ellipk_agm",
]

# mu0/(2*pi) in gauss * um / ampere: B[G] = 2000 * I[A] / r[um] for one line.
_B_PREFACTOR = mu_0 / (2 * np.pi) * 1e10

# Minimum filament-to-point distance before the 1/r field is meaningless.
SINGULAR_DISTANCE_UM = 0.01

REFLECTION_FLOOR_DB = -200.0

# Band over which the quasi-static picture was checked against full-wave runs.
_BAND_HZ = (70e6, 3e9)

FIELD_MAP_CSV_HEADER = "x_um,y_um,z_um,Bx_G,By_G,Bz_G"
DEPTH_PROFILE_CSV_HEADER = "z_um,Bx_G"


class FieldSingularityError(ValueError):
    """An observation point fell within SINGULAR_DISTANCE_UM of a filament."""


@dataclass(frozen=True)
class DriveConditions:
    """Microwave drive: input power, frequency, and the port impedance."""

    input_power_w: float = 1.0
    frequency_hz: float = 70e6
    reference_impedance_ohm: float = 50.0

    def __post_init__(self):
        if self.input_power_w < 0:
            raise ValueError(f"input_power_w must be >= 0, got {self.input_power_w}")
        if not _BAND_HZ[0] <= self.frequency_hz <= _BAND_HZ[1]:
            warnings.warn(
                f"frequency {self.frequency_hz:g} Hz is outside the validated "
                f"{_BAND_HZ[0]:g}-{_BAND_HZ[1]:g} Hz band",
                stacklevel=2,
            )


@dataclass(frozen=True)
class FieldSample:
    """Field phasor amplitude (gauss, peak) at one point (um)."""

    x_um: float
    y_um: float
    z_um: float
    bx_g: float
    by_g: float
    bz_g: float


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, z) grid at fixed y; ranges inclusive of endpoints."""

    x0_um: float
    x1_um: float
    dx_um: float
    z0_um: float
    z1_um: float
    dz_um: float
    y_um: float = 0.0

    def __post_init__(self):
        if self.dx_um <= 0 or self.dz_um <= 0:
            raise ValueError("grid steps must be > 0")
        if self.x1_um < self.x0_um or self.z1_um < self.z0_um:
            raise ValueError("grid ranges must be ordered")

    def x_values(self) -> np.ndarray:
        return np.arange(self.x0_um, self.x1_um + self.dx_um / 2, self.dx_um)

    def z_values(self) -> np.ndarray:
        return np.arange(self.z0_um, self.z1_um + self.dz_um / 2, self.dz_um)


@dataclass(frozen=True)
class FieldMap:
    """Row-major field samples over a GridSpec (z rows, x columns)."""

    grid: GridSpec
    samples: tuple[FieldSample, ...]

    def __post_init__(self):
        nx, nz = len(self.grid.x_values()), len(self.grid.z_values())
        if len(self.samples) != nx * nz:
            raise ValueError(
                f"sample count {len(self.samples)} != grid size {nx * nz}")

    def to_csv(self, path) -> None:
        lines = [FIELD_MAP_CSV_HEADER]
        for s in self.samples:
            lines.append(",".join(
                repr(float(v)) for v in
                (s.x_um, s.y_um, s.z_um, s.bx_g, s.by_g, s.bz_g)))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class DepthProfile:
    """In-plane field at the slit center versus depth, with its maximum.

    ``argmax_depth_um``/``max_bx_g`` are refined beyond the sample grid when
    the maximum is interior, so ``max_bx_g >= bx_g.max()`` and the refined
    depth stays within one step of the sampled argmax.
    """

    z_um: np.ndarray
    bx_g: np.ndarray
    argmax_depth_um: float
    max_bx_g: float
    interior_max: bool

    def is_monotone_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.bx_g) < 0))

    def to_csv(self, path) -> None:
        lines = [DEPTH_PROFILE_CSV_HEADER]
        for z, bx in zip(self.z_um, self.bx_g):
            lines.append(f"{float(z)!r},{float(bx)!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def summary(self) -> dict:
        return {
            "argmax_depth_um": float(self.argmax_depth_um),
            "max_bx_G": float(self.max_bx_g),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def ellipk_agm(k: float, tol: float = 1e-12) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention.

    Evaluated by the arithmetic-geometric mean: K(k) = pi / (2 * agm(1, k')).
    The iteration converges quadratically; ``tol`` bounds |a - g| at exit.
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"elliptic modulus must satisfy 0 <= k < 1, got {k}")
    a, g = 1.0, math.sqrt(1.0 - k * k)
    while abs(a - g) > tol:
        a, g = 0.5 * (a + g), math.sqrt(a * g)
    return math.pi / (2 * a)


def _k_ratio(k: float) -> float:
    """K(k) / K(k') with k' the complementary modulus."""
    return ellipk_agm(k) / ellipk_agm(math.sqrt(1.0 - k * k))


def effective_permittivity(geometry: WaveguideGeometry) -> float:
    """Quasi-TEM effective permittivity of the (unslit) cross-section.

    Finite-substrate filling factor: eps_eff = 1 + q * (eps_r - 1) with
    q = K(k2)/K'(k2) / (2 K(k1)/K'(k1)), k1 = a/b and
    k2 = sinh(pi a / 2h) / sinh(pi b / 2h).
    """
    validate(geometry)
    a = geometry.signal_width_um / 2
    b = a + geometry.gap_width_um
    h = geometry.substrate_thickness_um
    k1 = a / b
    k2 = math.sinh(math.pi * a / (2 * h)) / math.sinh(math.pi * b / (2 * h))
    q = 0.5 * _k_ratio(k2) / _k_ratio(k1)
    return 1.0 + q * (geometry.substrate_rel_permittivity - 1.0)


def cpw_impedance(geometry: WaveguideGeometry) -> float:
    """Characteristic impedance (ohm) of the coplanar waveguide.

    Conformal-mapping result for a zero-thickness line on a finite dielectric
    substrate. The slit is ignored: the impedance belongs to the unslit
    cross-section that carries the traveling wave.
    """
    validate(geometry)
    a = geometry.signal_width_um / 2
    b = a + geometry.gap_width_um
    eps_eff = effective_permittivity(geometry)
    eta0 = math.sqrt(mu_0 / epsilon_0)
    return eta0 / (4.0 * math.sqrt(eps_eff) * _k_ratio(a / b))


def power_to_current(drive: DriveConditions, z0_ohm: float) -> float:
    """Peak current (A) of a matched traveling wave: I = sqrt(2 P / Z0)."""
    if z0_ohm <= 0:
        raise ValueError(f"z0_ohm must be > 0, got {z0_ohm}")
    return math.sqrt(2.0 * drive.input_power_w / z0_ohm)


def _field_arrays(filaments: FilamentSet, x_um, z_um,
                  chunk: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (Bx, Bz) in gauss at arrays of points.

    Raises FieldSingularityError naming the first offending point when any
    point sits within SINGULAR_DISTANCE_UM of a filament. Summation order over
    filaments is fixed, so results do not depend on chunking.
    """
    x = np.atleast_1d(np.asarray(x_um, dtype=float))
    z = np.atleast_1d(np.asarray(z_um, dtype=float))
    x, z = np.broadcast_arrays(x, z)
    shape = x.shape
    x, z = x.ravel(), z.ravel()
    fx = filaments.x_um
    fc = filaments.current_a
    bx = np.empty_like(x)
    bz = np.empty_like(x)
    lim2 = SINGULAR_DISTANCE_UM ** 2
    for lo in range(0, x.size, chunk):
        sl = slice(lo, lo + chunk)
        dx = x[sl, None] - fx[None, :]
        r2 = dx * dx + z[sl, None] ** 2
        rmin2 = r2.min(axis=1)
        if np.any(rmin2 < lim2):
            i = int(np.argmax(rmin2 < lim2))
            raise FieldSingularityError(
                f"point (x={x[sl][i]:g}, z={z[sl][i]:g}) um is within "
                f"{SINGULAR_DISTANCE_UM} um of a filament")
        zz = z[sl, None]
        bx[sl] = _B_PREFACTOR * (fc * zz / r2).sum(axis=1)
        bz[sl] = -_B_PREFACTOR * (fc * dx / r2).sum(axis=1)
    return bx.reshape(shape), bz.reshape(shape)


def b_field_at(filaments: FilamentSet, point: tuple[float, float]) -> tuple[float, float]:
    """(Bx, Bz) in gauss at one (x, z) point in um."""
    bx, bz = _field_arrays(filaments, point[0], point[1])
    return float(bx[0]), float(bz[0])


def _drive_filaments(geometry: WaveguideGeometry, drive: DriveConditions,
                     section: Section | str, filaments_per_strip: int) -> FilamentSet:
    current = power_to_current(drive, cpw_impedance(geometry))
    return build_filaments(geometry, section, current, filaments_per_strip)


def field_map(geometry: WaveguideGeometry, drive: DriveConditions,
              section: Section | str, grid: GridSpec,
              filaments_per_strip: int = DEFAULT_FILAMENTS_PER_STRIP) -> FieldMap:
    """Sample the field on a rectangular grid (row-major: z rows, x columns).

    If any node collides with a filament (the z = 0 row crossing a strip),
    the whole z axis is shifted by half a grid step and the shifted
    coordinates are recorded in the samples. By is identically zero in the
    2-D model.
    """
    fil = _drive_filaments(geometry, drive, section, filaments_per_strip)
    xs = grid.x_values()
    zs = grid.z_values()
    xx, zz = np.meshgrid(xs, zs)
    dmin = _min_distance_um(fil, xx.ravel(), zz.ravel())
    if dmin < SINGULAR_DISTANCE_UM:
        zs = zs + grid.dz_um / 2
        xx, zz = np.meshgrid(xs, zs)
    bx, bz = _field_arrays(fil, xx, zz)
    samples = tuple(
        FieldSample(float(x), grid.y_um, float(z), float(vx), 0.0, float(vz))
        for x, z, vx, vz in zip(xx.ravel(), zz.ravel(), bx.ravel(), bz.ravel())
    )
    return FieldMap(grid, samples)


def _min_distance_um(filaments: FilamentSet, x, z) -> float:
    dx = np.asarray(x, dtype=float)[:, None] - filaments.x_um[None, :]
    r2 = dx * dx + np.asarray(z, dtype=float)[:, None] ** 2
    return float(np.sqrt(r2.min()))


def line_scan(geometry: WaveguideGeometry, drive: DriveConditions,
              section: Section | str, x_um, z_um: float,
              filaments_per_strip: int = DEFAULT_FILAMENTS_PER_STRIP) -> list[FieldSample]:
    """Field samples along x at a fixed depth z (an x-scan).

    y-scans are constant by construction in the 2-D model, so only x-scans
    are offered.
    """
    fil = _drive_filaments(geometry, drive, section, filaments_per_strip)
    x = np.asarray(x_um, dtype=float)
    bx, bz = _field_arrays(fil, x, np.full_like(x, float(z_um)))
    return [FieldSample(float(xv), 0.0, float(z_um), float(vx), 0.0, float(vz))
            for xv, vx, vz in zip(x, bx, bz)]


def _golden_max(f, lo: float, hi: float, tol: float = 1e-6) -> tuple[float, float]:
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
    xm = 0.5 * (lo + hi)
    return xm, f(xm)


def depth_profile(geometry: WaveguideGeometry, drive: DriveConditions,
                  section: Section | str, z_range_um: tuple[float, float],
                  z_step_um: float,
                  filaments_per_strip: int = DEFAULT_FILAMENTS_PER_STRIP) -> DepthProfile:
    """Bx at the slit center (x = 0) sampled over depth.

    The argmax is located by a grid scan followed by golden-section
    refinement when the maximum is interior to the range.
    """
    z0, z1 = z_range_um
    if not 0 < z0 <= z1:
        raise ValueError(f"z range must satisfy 0 < z0 <= z1, got {z_range_um}")
    if z1 > geometry.substrate_thickness_um:
        raise ValueError(
            f"z range exceeds substrate thickness {geometry.substrate_thickness_um} um")
    if z_step_um <= 0:
        raise ValueError(f"z_step_um must be > 0, got {z_step_um}")
    fil = _drive_filaments(geometry, drive, section, filaments_per_strip)
    zs = np.arange(z0, z1 + z_step_um / 2, z_step_um)
    bx, _ = _field_arrays(fil, np.zeros_like(zs), zs)
    i = int(np.argmax(bx))
    interior = 0 < i < len(zs) - 1
    if interior:
        zm, bm = _golden_max(
            lambda z: float(_field_arrays(fil, 0.0, z)[0][0]), zs[i - 1], zs[i + 1])
        if bm < bx[i]:
            zm, bm = float(zs[i]), float(bx[i])
    else:
        zm, bm = float(zs[i]), float(bx[i])
    return DepthProfile(zs, bx, float(zm), float(bm), interior)


def reflection_estimate(z_line_ohm: float, z_ref_ohm: float) -> float:
    """Lumped impedance-mismatch reflection in dB: 20 log10 |G|.

    G = (z_line - z_ref) / (z_line + z_ref); a perfect match returns the
    -200 dB floor rather than -inf. This is a mismatch proxy only, not a
    full-wave S11.
    """
    if z_line_ohm <= 0 or z_ref_ohm <= 0:
        raise ValueError("impedances must be > 0")
    gamma = abs(z_line_ohm - z_ref_ohm) / (z_line_ohm + z_ref_ohm)
    if gamma == 0:
        return REFLECTION_FLOOR_DB
    return max(20.0 * math.log10(gamma), REFLECTION_FLOOR_DB)
