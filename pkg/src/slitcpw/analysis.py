"""Measurement-versus-simulation analysis for in-plane field profiles.

Converts fitted Rabi frequencies into field amplitudes, inverts resonance
pairs into static-field and splitting candidates, and compares normalized
spatial profiles. Comparisons are always on normalized profiles: the
absolute drive power reaching the waveguide is not knowable precisely, so
only shapes are meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .spinphys import SpinParams

__all__ = [
    "FieldProfile",
    "BranchCandidate",
    "ProfileComparison",
    "rabi_to_field",
    "b0_and_d_from_resonances",
    "normalize_profile",
    "compare_profiles",
]

PROFILE_CSV_HEADER = "x_um,value"


@dataclass(frozen=True)
class FieldProfile:
    """In-plane field versus position, possibly normalized to the x = 0 value."""

    x_um: np.ndarray
    values: np.ndarray
    normalization_reference: float | None = None

    def __post_init__(self):
        x = np.asarray(self.x_um, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or len(x) < 2:
            raise ValueError("profile needs at least 2 positions")
        if not np.all(np.diff(x) > 0):
            raise ValueError("positions must be strictly increasing")
        if v.shape != x.shape:
            raise ValueError("values and positions must have the same length")
        object.__setattr__(self, "x_um", x)
        object.__setattr__(self, "values", v)

    def value_at(self, x: float) -> float:
        """Linear interpolation; x must be inside the covered range."""
        if not self.x_um[0] <= x <= self.x_um[-1]:
            raise ValueError(
                f"x = {x} um outside profile range "
                f"[{self.x_um[0]}, {self.x_um[-1]}] um")
        return float(np.interp(x, self.x_um, self.values))

    def to_csv(self, path) -> None:
        lines = [PROFILE_CSV_HEADER]
        lines += [f"{float(x)!r},{float(v)!r}"
                  for x, v in zip(self.x_um, self.values)]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "FieldProfile":
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        if not lines or lines[0] != PROFILE_CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {PROFILE_CSV_HEADER!r}")
        pairs = [ln.split(",") for ln in lines[1:]]
        return cls(np.array([float(p[0]) for p in pairs]),
                   np.array([float(p[1]) for p in pairs]))


@dataclass(frozen=True)
class BranchCandidate:
    """One branch of the resonance-pair inversion.

    The absolute value in the lower resonance makes the inversion two-valued;
    ``plausible`` reports whether the candidate's splitting falls inside a
    caller-supplied prior interval (None when no prior was given). Selection
    is left to the caller.
    """

    branch: str
    b0_g: float
    d_mhz: float
    plausible: bool | None = None


def rabi_to_field(params: SpinParams, f_rabi_mhz: float) -> float:
    """Invert the Rabi relation: B_AC,x = f_Rabi h / (sqrt(3) g muB), in gauss."""
    if f_rabi_mhz < 0:
        raise ValueError(f"f_rabi_mhz must be >= 0, got {f_rabi_mhz}")
    return f_rabi_mhz / (math.sqrt(3.0) * params.gyromagnetic_mhz_per_g)


def b0_and_d_from_resonances(f_plus_mhz: float, f_minus_mhz: float,
                             params: SpinParams = SpinParams(),
                             d_prior_mhz: tuple[float, float] | None = None
                             ) -> tuple[BranchCandidate, BranchCandidate]:
    """Both (B0, D/h) solutions of a resonance pair.

    Low-field branch (gamma B0 < 2D): D = (f+ + f-)/4, B0 = (f+ - f-)/(2 gamma).
    High-field branch (gamma B0 > 2D): D = (f+ - f-)/4, B0 = (f+ + f-)/(2 gamma).
    Both are returned; disambiguation is never automatic. Passing
    ``d_prior_mhz`` = (lo, hi) marks each candidate's plausibility.
    """
    if f_minus_mhz < 0:
        raise ValueError(f"f_minus_mhz must be >= 0, got {f_minus_mhz}")
    if f_plus_mhz < f_minus_mhz:
        raise ValueError(
            f"f_plus ({f_plus_mhz} MHz) must be >= f_minus ({f_minus_mhz} MHz)")
    gamma = params.gyromagnetic_mhz_per_g
    low = BranchCandidate(
        "low_field",
        b0_g=(f_plus_mhz - f_minus_mhz) / (2 * gamma),
        d_mhz=(f_plus_mhz + f_minus_mhz) / 4,
    )
    high = BranchCandidate(
        "high_field",
        b0_g=(f_plus_mhz + f_minus_mhz) / (2 * gamma),
        d_mhz=(f_plus_mhz - f_minus_mhz) / 4,
    )
    if d_prior_mhz is not None:
        lo, hi = d_prior_mhz
        low = BranchCandidate(low.branch, low.b0_g, low.d_mhz,
                              lo <= low.d_mhz <= hi)
        high = BranchCandidate(high.branch, high.b0_g, high.d_mhz,
                               lo <= high.d_mhz <= hi)
    return low, high


def normalize_profile(profile: FieldProfile) -> FieldProfile:
    """Divide every value by the (interpolated) value at x = 0.

    The profile must cover x = 0. A zero reference (forced by symmetry for
    surface profiles) is an error. Idempotent: a normalized profile has
    reference 1.
    """
    ref = profile.value_at(0.0)
    if ref == 0.0:
        raise ValueError("profile value at x = 0 is zero; cannot normalize")
    return FieldProfile(profile.x_um, profile.values / ref,
                        normalization_reference=1.0)


@dataclass(frozen=True)
class ProfileComparison:
    """Pointwise comparison of two profiles on the measured positions."""

    rms_deviation: float
    max_deviation: float
    table: tuple[tuple[float, float, float, float], ...]  # x, measured, simulated, deviation

    def to_dict(self) -> dict:
        return {
            "rms_deviation": self.rms_deviation,
            "max_deviation": self.max_deviation,
            "points": [
                {"x_um": x, "measured": m, "simulated": s, "deviation": d}
                for x, m, s, d in self.table
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def compare_profiles(measured: FieldProfile,
                     simulated: FieldProfile) -> ProfileComparison:
    """RMS and maximum absolute deviation between two profiles.

    The simulated profile is resampled onto the measured positions by linear
    interpolation; every measured position must lie inside the simulated
    range. Intended for normalized profiles, where the deviations read
    directly as fractions of the center value. The RMS metric is symmetric
    in the two arguments once both are resampled to the same grid.
    """
    if (measured.x_um[0] < simulated.x_um[0]
            or measured.x_um[-1] > simulated.x_um[-1]):
        raise ValueError(
            f"measured positions [{measured.x_um[0]}, {measured.x_um[-1]}] um "
            f"extend outside the simulated range "
            f"[{simulated.x_um[0]}, {simulated.x_um[-1]}] um")
    sim = np.interp(measured.x_um, simulated.x_um, simulated.values)
    dev = measured.values - sim
    table = tuple(
        (float(x), float(m), float(s), float(d))
        for x, m, s, d in zip(measured.x_um, measured.values, sim, dev))
    return ProfileComparison(
        rms_deviation=float(np.sqrt(np.mean(dev ** 2))),
        max_deviation=float(np.max(np.abs(dev))),
        table=table,
    )
