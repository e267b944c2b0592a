"""Voigt profile evaluation shared by spectrum synthesis and fitting."""

from __future__ import annotations

import numpy as np
from scipy.special import wofz

__all__ = ["voigt"]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def voigt(x, sigma: float, gamma: float):
    """Area-normalized Voigt profile: Gaussian(sigma) convolved with Lorentzian(gamma).

    Evaluated through the Faddeeva function w(z),
    V(x) = Re[w((x + i*gamma) / (sigma*sqrt(2)))] / (sigma*sqrt(2*pi)),
    which is accurate to well below 1e-6 relative over the whole plane.
    Degenerate widths reduce to the pure Gaussian (gamma = 0) or pure
    Lorentzian (sigma = 0); both zero is an error.
    """
    if sigma < 0 or gamma < 0:
        raise ValueError(f"widths must be >= 0, got sigma={sigma}, gamma={gamma}")
    if sigma == 0 and gamma == 0:
        raise ValueError("sigma and gamma cannot both be 0")
    x = np.asarray(x, dtype=float)
    if sigma == 0:
        out = (gamma / np.pi) / (x * x + gamma * gamma)
    elif gamma == 0:
        out = np.exp(-x * x / (2 * sigma * sigma)) / (sigma * _SQRT_2PI)
    else:
        z = (x + 1j * gamma) / (sigma * np.sqrt(2.0))
        out = wofz(z).real / (sigma * _SQRT_2PI)
    return out if out.ndim else float(out)
