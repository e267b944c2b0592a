"""Slit-loaded coplanar waveguide cross-section and its filament discretization.

All transverse dimensions are micrometers. The coordinate origin sits at the
center of the slit on the substrate surface; x runs across the waveguide and
z into the substrate. The 2-D treatment assumes translation invariance along
the slit (y), which holds away from the slit ends.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

__all__ = [
    "GeometryError",
    "Section",
    "WaveguideGeometry",
    "Strip",
    "FilamentSet",
    "geometry_violations",
    "validate",
    "build_filaments",
    "load_geometry",
    "GEOMETRY_FILE_KEYS",
]

DEFAULT_FILAMENTS_PER_STRIP = 400


class GeometryError(ValueError):
    """A waveguide description or filament request violates its constraints."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class Section(str, enum.Enum):
    """Cross-section selector: through the slit or through the solid line."""

    WITH_SLIT = "with_slit"
    WITHOUT_SLIT = "without_slit"


@dataclass(frozen=True)
class WaveguideGeometry:
    """Cross-section of a coplanar waveguide with an optional slit.

    Defaults describe a 100 um signal line with 40 um gaps and a 40 um slit
    on a 300 um dielectric substrate. ``slit_width_um = 0`` means a plain
    coplanar waveguide.
    """

    signal_width_um: float = 100.0
    gap_width_um: float = 40.0
    ground_width_um: float = 200.0
    slit_width_um: float = 40.0
    slit_length_um: float = 300.0
    metal_thickness_um: float = 2.0
    substrate_thickness_um: float = 300.0
    substrate_rel_permittivity: float = 9.66

    @property
    def total_width_um(self) -> float:
        return (self.signal_width_um + 2 * self.gap_width_um
                + 2 * self.ground_width_um)


@dataclass(frozen=True)
class Strip:
    """One conductor strip: extent, assigned current, and filament rows."""

    x_lo_um: float
    x_hi_um: float
    current_a: float
    start: int
    stop: int


@dataclass(frozen=True)
class FilamentSet:
    """Discretized current layout: line filaments at z = 0.

    ``x_um[k]`` carries ``current_a[k]`` amperes along y. Strips record which
    rows belong to which conductor.
    """

    x_um: np.ndarray
    current_a: np.ndarray
    section: Section
    strips: tuple[Strip, ...]

    @property
    def net_current_a(self) -> float:
        return float(self.current_a.sum())

    def strip_rows(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        s = self.strips[i]
        return self.x_um[s.start:s.stop], self.current_a[s.start:s.stop]


def geometry_violations(geometry: WaveguideGeometry) -> list[str]:
    """Return a list of violated constraints, empty when the geometry is valid."""
    v = []
    positive = [
        "signal_width_um", "gap_width_um", "ground_width_um",
        "slit_length_um", "metal_thickness_um", "substrate_thickness_um",
    ]
    for name in positive:
        val = getattr(geometry, name)
        if not val > 0:
            v.append(f"{name} must be > 0, got {val}")
    if geometry.slit_width_um < 0:
        v.append(f"slit_width_um must be >= 0, got {geometry.slit_width_um}")
    if not geometry.slit_width_um < geometry.signal_width_um:
        v.append("slit_width_um < signal_width_um violated: "
                 f"{geometry.slit_width_um} >= {geometry.signal_width_um}")
    if geometry.substrate_rel_permittivity < 1:
        v.append("substrate_rel_permittivity must be >= 1, got "
                 f"{geometry.substrate_rel_permittivity}")
    return v


def validate(geometry: WaveguideGeometry) -> WaveguideGeometry:
    """Return the geometry unchanged, or raise GeometryError listing violations."""
    v = geometry_violations(geometry)
    if v:
        raise GeometryError(v)
    return geometry


def _midpoints(n: int, hi: float) -> np.ndarray:
    """Midpoint nodes of n equal subintervals of [0, hi]."""
    return (2 * np.arange(1, n + 1) - 1) * (hi / (2 * n))


def _signal_strip(a: float, b: float, current: float, n: int):
    """Full signal strip [-a, a] with the coplanar-mode current density.

    j(x) is proportional to 1 / sqrt((a^2 - x^2)(b^2 - x^2)), singular at both
    strip edges (b is the inner ground edge). Sampling at x = a*cos(theta)
    with midpoint theta absorbs the edge singularities into the node density;
    the remaining weight is smooth and periodic, so the midpoint sum
    converges spectrally.
    """
    theta = _midpoints(n, np.pi)
    x = a * np.cos(theta)
    w = 1.0 / np.sqrt(b * b - x * x)
    return x, w / w.sum() * current


def _half_strip(s: float, a: float, b: float, current: float, n: int):
    """Half signal strip [s, a] (slit edge at s, gap edge at a).

    The slit restricts the full-strip density, which stays singular at the
    gap edge x = a only. Substituting a - x = (a - s) sin^2(phi) removes that
    singularity; midpoint phi nodes cluster at both strip ends.
    """
    phi = _midpoints(n, np.pi / 2)
    x = a - (a - s) * np.sin(phi) ** 2
    w = np.cos(phi) / (np.sqrt(a + x) * np.sqrt(b * b - x * x))
    return x, w / w.sum() * current


def _ground_strip(a: float, b: float, c: float, current: float, n: int):
    """Ground strip [b, c]; return current density singular at the inner edge b.

    Uses the coplanar-mode ground density j(x) ~ 1 / sqrt((x^2 - a^2)(x^2 - b^2))
    truncated at the finite outer edge c, via x - b = (c - b) sin^2(phi).
    """
    phi = _midpoints(n, np.pi / 2)
    x = b + (c - b) * np.sin(phi) ** 2
    w = np.cos(phi) / (np.sqrt(x + b) * np.sqrt(x * x - a * a))
    return x, w / w.sum() * current


def build_filaments(geometry: WaveguideGeometry,
                    section: Section | str,
                    total_current_a: float,
                    filaments_per_strip: int = DEFAULT_FILAMENTS_PER_STRIP) -> FilamentSet:
    """Discretize the cross-section into current filaments.

    The signal conductor carries +total_current_a (split equally between the
    two half-strips when sectioning through the slit); each ground strip
    returns -total_current_a / 2. Filament weights follow the quasi-TEM
    coplanar-mode current distribution, so current concentrates at the strip
    edges facing the gaps.
    """
    validate(geometry)
    section = Section(section)
    if not np.isfinite(total_current_a):
        raise GeometryError(f"total_current_a must be finite, got {total_current_a}")
    if filaments_per_strip < 2:
        raise GeometryError(
            f"filaments_per_strip must be >= 2, got {filaments_per_strip}")
    if section is Section.WITH_SLIT and geometry.slit_width_um == 0:
        raise GeometryError("with_slit section requested but slit_width_um is 0")

    a = geometry.signal_width_um / 2
    b = a + geometry.gap_width_um
    c = b + geometry.ground_width_um
    n = filaments_per_strip

    pieces: list[tuple[float, float, np.ndarray, np.ndarray]] = []
    if section is Section.WITH_SLIT:
        s = geometry.slit_width_um / 2
        x, w = _half_strip(s, a, b, total_current_a / 2, n)
        pieces.append((-a, -s, -x, w))
        pieces.append((s, a, x, w))
    else:
        x, w = _signal_strip(a, b, total_current_a, n)
        pieces.append((-a, a, x, w))
    xg, wg = _ground_strip(a, b, c, -total_current_a / 2, n)
    pieces.append((-c, -b, -xg, wg))
    pieces.append((b, c, xg, wg))

    strips = []
    offset = 0
    for x_lo, x_hi, x, w in pieces:
        strips.append(Strip(x_lo, x_hi, float(w.sum()), offset, offset + n))
        offset += n
    x_all = np.concatenate([p[2] for p in pieces])
    w_all = np.concatenate([p[3] for p in pieces])
    return FilamentSet(x_all, w_all, section, tuple(strips))


GEOMETRY_FILE_KEYS = {
    "signal_width_um": "signal_width_um",
    "gap_width_um": "gap_width_um",
    "ground_width_um": "ground_width_um",
    "slit_width_um": "slit_width_um",
    "slit_length_um": "slit_length_um",
    "metal_thickness_um": "metal_thickness_um",
    "substrate_thickness_um": "substrate_thickness_um",
    "eps_r": "substrate_rel_permittivity",
}


def load_geometry(path: str | Path) -> WaveguideGeometry:
    """Load a geometry from a key=value text file.

    Recognized keys: signal_width_um, gap_width_um, ground_width_um,
    slit_width_um, slit_length_um, metal_thickness_um, substrate_thickness_um,
    eps_r. Missing keys fall back to the defaults; unknown keys are an error.
    Blank lines and '#' comments are ignored.
    """
    path = Path(path)
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GeometryError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in GEOMETRY_FILE_KEYS:
            raise GeometryError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[GEOMETRY_FILE_KEYS[key]] = float(val.strip())
        except ValueError:
            raise GeometryError(
                f"{path}:{lineno}: value for {key!r} is not a number: {val.strip()!r}")
    return validate(WaveguideGeometry(**values))


def save_geometry(geometry: WaveguideGeometry, path: str | Path) -> None:
    """Write a geometry file readable by load_geometry."""
    field_to_key = {v: k for k, v in GEOMETRY_FILE_KEYS.items()}
    lines = [f"{field_to_key[f.name]} = {float(getattr(geometry, f.name))!r}"
             for f in fields(geometry)]
    Path(path).write_text("\n".join(lines) + "\n")
