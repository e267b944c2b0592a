"""Spin-3/2 ground-state physics of the silicon-vacancy center.

Models the axial Hamiltonian H/h = D(Sz^2 - S(S+1)/3) + g*muB/h * B0.S in
MHz units, its resonance frequencies, the Rabi frequency driven by an
in-plane microwave field, and synthesis of spectroscopy-style datasets
(frequency-swept contrast and Rabi traces). The hyperfine interaction and
the transverse zero-field term are neglected throughout, matching the
modelled defect at the fields of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lineshape import voigt

__all__ = [
    "MU_B_OVER_H_MHZ_PER_G",
    "SpinParams",
    "StaticField",
    "Transition",
    "SpinSpectrum",
    "OdmrSpectrum",
    "RabiTrace",
    "PeakShape",
    "spin_matrices",
    "hamiltonian",
    "transition_frequencies",
    "f_plus",
    "f_minus",
    "level_crossing_field_g",
    "rabi_frequency",
    "synthesize_odmr",
    "synthesize_rabi",
]

# Bohr magneton over Planck constant in MHz per gauss, per unit g-factor.
# g = 2.0 gives the working value 2.7993 MHz/G.
MU_B_OVER_H_MHZ_PER_G = 1.39965

_SPIN = 1.5


def spin_matrices(s: float = _SPIN) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Sx, Sy, Sz) in the |m> basis ordered m = +s ... -s."""
    m = np.arange(s, -s - 1, -1)
    dim = len(m)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        sp[i, i + 1] = math.sqrt(s * (s + 1) - m[i + 1] * (m[i + 1] + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    return sx, sy, sz


SX, SY, SZ = spin_matrices()


@dataclass(frozen=True)
class SpinParams:
    """Zero-field splitting D/h (MHz) and g-factor of an S = 3/2 spin."""

    zero_field_splitting_mhz: float = 35.0
    g_factor: float = 2.0
    spin: float = _SPIN

    def __post_init__(self):
        if self.zero_field_splitting_mhz <= 0:
            raise ValueError("zero_field_splitting_mhz must be > 0")
        if self.g_factor <= 0:
            raise ValueError("g_factor must be > 0")
        if self.spin != _SPIN:
            raise ValueError("only spin 3/2 is supported")

    @property
    def gyromagnetic_mhz_per_g(self) -> float:
        """g * muB / h in MHz per gauss."""
        return self.g_factor * MU_B_OVER_H_MHZ_PER_G


@dataclass(frozen=True)
class StaticField:
    """DC magnetic field: magnitude (gauss) and unit orientation vector."""

    b0_g: float
    orientation: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        n = math.sqrt(sum(c * c for c in self.orientation))
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"orientation must be a unit vector, |n| = {n}")


@dataclass(frozen=True)
class Transition:
    """Level pair (indices into the ascending eigenvalues) with its frequency
    and |<i|Sx|j>| matrix element; flagged marks the two dominant allowed
    transitions."""

    level_i: int
    level_j: int
    frequency_mhz: float
    sx_element: float
    flagged: bool = False


@dataclass(frozen=True)
class SpinSpectrum:
    """Eigenvalues (MHz, ascending) and the table of all level pairs."""

    eigenvalues_mhz: np.ndarray
    transitions: tuple[Transition, ...]

    @property
    def flagged(self) -> tuple[Transition, Transition]:
        t = tuple(tr for tr in self.transitions if tr.flagged)
        if len(t) != 2:
            raise RuntimeError(f"expected 2 flagged transitions, found {len(t)}")
        return t  # type: ignore[return-value]

    @property
    def f_minus_mhz(self) -> float:
        return min(tr.frequency_mhz for tr in self.flagged)

    @property
    def f_plus_mhz(self) -> float:
        return max(tr.frequency_mhz for tr in self.flagged)


def hamiltonian(params: SpinParams, field: StaticField) -> np.ndarray:
    """4x4 Hermitian spin Hamiltonian in MHz (divided by Planck's constant).

    H/h = D (Sz^2 - S(S+1)/3) + gamma * B0 * (n . S). Traceless by the
    -S(S+1)/3 term.
    """
    d = params.zero_field_splitting_mhz
    gamma = params.gyromagnetic_mhz_per_g
    nx, ny, nz = field.orientation
    h = d * (SZ @ SZ - _SPIN * (_SPIN + 1) / 3 * np.eye(4))
    h = h + gamma * field.b0_g * (nx * SX + ny * SY + nz * SZ)
    return h


def transition_frequencies(params: SpinParams, field: StaticField) -> SpinSpectrum:
    """Diagonalize the Hamiltonian and tabulate every level pair.

    The two flagged transitions are the dominant |Sx| matrix elements among
    pairs connecting the |m|=1/2 and |m|=3/2 manifolds; these are the
    optically detectable lines (the 1/2 <-> -1/2 pair has the largest |Sx|
    of all but produces no photoluminescence contrast). For axial fields the
    flagged frequencies equal the closed forms f_plus / f_minus.
    """
    h = hamiltonian(params, field)
    resid = np.abs(h - h.conj().T).max()
    if resid > 1e-12 * max(np.abs(h).max(), 1.0):
        raise RuntimeError(f"Hamiltonian Hermiticity residual {resid:g}")
    evals, vecs = np.linalg.eigh(h)
    sx_eig = np.abs(vecs.conj().T @ SX @ vecs)
    # weight of each eigenvector on the |m = +/-3/2> basis states
    w32 = np.abs(vecs[0, :]) ** 2 + np.abs(vecs[3, :]) ** 2
    cross = []
    table = []
    for i in range(4):
        for j in range(i + 1, 4):
            freq = float(evals[j] - evals[i])
            el = float(sx_eig[i, j])
            table.append((i, j, freq, el))
            if (w32[i] - 0.5) * (w32[j] - 0.5) < 0:
                cross.append((el, i, j))
    cross.sort(reverse=True)
    flagged_pairs = {(i, j) for _, i, j in cross[:2]}
    transitions = tuple(
        Transition(i, j, freq, el, (i, j) in flagged_pairs)
        for i, j, freq, el in table)
    return SpinSpectrum(evals, transitions)


def f_plus(params: SpinParams, b0_g: float) -> float:
    """Upper resonance (MHz) for an axial field: 2D/h + g muB B0 / h."""
    if b0_g < 0:
        raise ValueError(f"b0_g must be >= 0, got {b0_g}")
    return 2 * params.zero_field_splitting_mhz + params.gyromagnetic_mhz_per_g * b0_g


def f_minus(params: SpinParams, b0_g: float) -> float:
    """Lower resonance (MHz) for an axial field: |2D/h - g muB B0 / h|."""
    if b0_g < 0:
        raise ValueError(f"b0_g must be >= 0, got {b0_g}")
    return abs(2 * params.zero_field_splitting_mhz
               - params.gyromagnetic_mhz_per_g * b0_g)


def level_crossing_field_g(params: SpinParams) -> float:
    """Axial field (gauss) where f_minus reaches zero: B0 = 2D h / (g muB)."""
    return 2 * params.zero_field_splitting_mhz / params.gyromagnetic_mhz_per_g


def rabi_frequency(params: SpinParams, b_ac_x_g: float) -> float:
    """Rabi frequency (MHz) of the +-3/2 <-> +-1/2 transitions.

    f_Rabi = sqrt(3) g muB B_AC,x / h; the sqrt(3) originates in the
    |<+-3/2|Sx|+-1/2>| = sqrt(3)/2 matrix element of the S = 3/2 ladder.
    """
    if b_ac_x_g < 0:
        raise ValueError(f"b_ac_x_g must be >= 0, got {b_ac_x_g}")
    return math.sqrt(3.0) * params.gyromagnetic_mhz_per_g * b_ac_x_g


@dataclass(frozen=True)
class PeakShape:
    """Height and Voigt widths of one synthesized contrast peak."""

    amplitude: float
    sigma_mhz: float
    gamma_mhz: float

    def __post_init__(self):
        if self.sigma_mhz < 0 or self.gamma_mhz < 0:
            raise ValueError("peak widths must be >= 0")
        if self.sigma_mhz == 0 and self.gamma_mhz == 0:
            raise ValueError("peak widths cannot both be 0")


def _check_grid(values: np.ndarray, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise ValueError(f"{name} must be a 1-D grid with >= 2 points")
    if not np.all(np.diff(values) > 0):
        raise ValueError(f"{name} must be strictly increasing")
    return values


@dataclass(frozen=True)
class OdmrSpectrum:
    """Frequency-swept contrast (I1 - I0)/I0 data."""

    freq_mhz: np.ndarray
    contrast: np.ndarray

    def __post_init__(self):
        freq = _check_grid(self.freq_mhz, "freq_mhz")
        contrast = np.asarray(self.contrast, dtype=float)
        if contrast.shape != freq.shape:
            raise ValueError("contrast and freq_mhz must have the same length")
        if not np.all(np.isfinite(contrast)):
            raise ValueError("contrast must be finite")
        object.__setattr__(self, "freq_mhz", freq)
        object.__setattr__(self, "contrast", contrast)

    def to_csv(self, path) -> None:
        _write_csv(path, "freq_MHz,contrast", self.freq_mhz, self.contrast)

    @classmethod
    def from_csv(cls, path) -> "OdmrSpectrum":
        f, c = _read_csv(path, "freq_MHz,contrast")
        return cls(f, c)


@dataclass(frozen=True)
class RabiTrace:
    """Microwave-duration-swept contrast data."""

    t_us: np.ndarray
    contrast: np.ndarray

    def __post_init__(self):
        t = _check_grid(self.t_us, "t_us")
        if t[0] < 0:
            raise ValueError("t_us must start at >= 0")
        contrast = np.asarray(self.contrast, dtype=float)
        if contrast.shape != t.shape:
            raise ValueError("contrast and t_us must have the same length")
        if not np.all(np.isfinite(contrast)):
            raise ValueError("contrast must be finite")
        object.__setattr__(self, "t_us", t)
        object.__setattr__(self, "contrast", contrast)

    def to_csv(self, path) -> None:
        _write_csv(path, "t_us,contrast", self.t_us, self.contrast)

    @classmethod
    def from_csv(cls, path) -> "RabiTrace":
        t, c = _read_csv(path, "t_us,contrast")
        return cls(t, c)


def _write_csv(path, header: str, xs, ys) -> None:
    lines = [header] + [f"{float(x)!r},{float(y)!r}" for x, y in zip(xs, ys)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_csv(path, expected_header: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != expected_header:
        raise ValueError(
            f"{path}: expected header {expected_header!r}, got {lines[:1]!r}")
    pairs = [ln.split(",") for ln in lines[1:]]
    xs = np.array([float(p[0]) for p in pairs])
    ys = np.array([float(p[1]) for p in pairs])
    return xs, ys


def synthesize_odmr(params: SpinParams, field: StaticField,
                    minus_peak: PeakShape | None, plus_peak: PeakShape | None,
                    freq_mhz, noise_sigma: float = 0.0,
                    seed: int = 0) -> OdmrSpectrum:
    """Synthetic contrast spectrum with Voigt peaks at the resonances.

    Peaks are height-normalized, contrast(f) = sum_k A_k V(f - f_k)/V(0),
    centered at the axial-field resonances f_minus / f_plus; pass None to
    omit a peak. The grid must cover every requested center. Gaussian noise
    is reproducible through the seed.
    """
    freq = _check_grid(np.asarray(freq_mhz, dtype=float), "freq_mhz")
    centers = []
    if minus_peak is not None:
        centers.append((f_minus(params, field.b0_g), minus_peak))
    if plus_peak is not None:
        centers.append((f_plus(params, field.b0_g), plus_peak))
    if not centers:
        raise ValueError("at least one peak must be requested")
    contrast = np.zeros_like(freq)
    for center, peak in centers:
        if not freq[0] <= center <= freq[-1]:
            raise ValueError(
                f"grid [{freq[0]:g}, {freq[-1]:g}] MHz does not cover the "
                f"requested peak at {center:g} MHz")
        shape = voigt(freq - center, peak.sigma_mhz, peak.gamma_mhz)
        contrast += peak.amplitude * shape / voigt(0.0, peak.sigma_mhz, peak.gamma_mhz)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        contrast = contrast + rng.normal(0.0, noise_sigma, freq.shape)
    return OdmrSpectrum(freq, contrast)


def synthesize_rabi(a_rabi: float, f_rabi_mhz: float, t2_star_us: float,
                    t_us, noise_sigma: float = 0.0, seed: int = 0) -> RabiTrace:
    """Synthetic Rabi trace C(t) = -A cos(2 pi f t) exp(-t/T2*) plus noise."""
    if t2_star_us <= 0:
        raise ValueError(f"t2_star_us must be > 0, got {t2_star_us}")
    if f_rabi_mhz < 0:
        raise ValueError(f"f_rabi_mhz must be >= 0, got {f_rabi_mhz}")
    t = _check_grid(np.asarray(t_us, dtype=float), "t_us")
    c = -a_rabi * np.cos(2 * np.pi * f_rabi_mhz * t) * np.exp(-t / t2_star_us)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        c = c + rng.normal(0.0, noise_sigma, t.shape)
    return RabiTrace(t, c)
