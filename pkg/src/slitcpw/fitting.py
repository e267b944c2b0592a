"""Damped least-squares engine and the two concrete spectroscopy fits.

The Levenberg-Marquardt implementation is deliberately small and fully
deterministic: numeric central-difference Jacobians, multiplicative damping
on the scaled normal equations, bounds by projection. It exists so that fit
behavior (iteration counts, stopping rules, uncertainty estimates) is pinned
by this package rather than by an external optimizer's version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .lineshape import voigt
from .spinphys import OdmrSpectrum, RabiTrace

__all__ = [
    "FitError",
    "FitInitializationError",
    "FitResult",
    "VoigtParams",
    "voigt",
    "lm_fit",
    "fit_odmr",
    "fit_rabi",
    "odmr_model",
    "rabi_model",
]

MAX_ITERATIONS = 200
COST_TOL = 1e-10
STEP_TOL = 1e-10
# Damping scales the diagonal of J^T J, so lambda is dimensionless. The small
# start makes the first step essentially Gauss-Newton: near-linear problems
# land in one or two iterations, and bad steps are cheap rejections.
LAMBDA_INIT = 1e-6
LAMBDA_ACCEPT = 0.3
LAMBDA_REJECT = 2.0


class FitError(RuntimeError):
    """The fit engine could not proceed (singular equations, bad setup)."""


class FitInitializationError(ValueError):
    """Automatic initialization failed; supply explicit starting values."""


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with standard-error estimates and diagnostics.

    ``stderr`` values come from the diagonal of the inverse damped normal
    matrix scaled by the residual variance; they are estimates only.
    ``cost_history`` records the cost after every accepted step.
    """

    model: str
    params: dict[str, float]
    stderr: dict[str, float]
    residual_norm: float
    iterations: int
    converged: bool
    cost_history: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "stderr": self.stderr,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class VoigtParams:
    """One Voigt peak: center, widths, and height."""

    center_mhz: float
    sigma_mhz: float
    gamma_mhz: float
    amplitude: float

    def __post_init__(self):
        if self.sigma_mhz < 0 or self.gamma_mhz < 0:
            raise ValueError("widths must be >= 0")
        if self.sigma_mhz == 0 and self.gamma_mhz == 0:
            raise ValueError("sigma and gamma cannot both be 0")


def _jacobian(model, x, p):
    """Central-difference Jacobian, step max(1e-6, 1e-6 |p_i|)."""
    m = len(model(x, p))
    jac = np.empty((m, len(p)))
    for i in range(len(p)):
        h = max(1e-6, 1e-6 * abs(p[i]))
        pp, pm = p.copy(), p.copy()
        pp[i] += h
        pm[i] -= h
        jac[:, i] = (model(x, pp) - model(x, pm)) / (2 * h)
    return jac


def _exact_sum(values: np.ndarray) -> float:
    return math.fsum(values)


def _normal_equations(jac: np.ndarray, r: np.ndarray):
    """J^T J, J^T r, and the cost with exactly rounded sums.

    fsum makes every reduction independent of data ordering, so fits are
    invariant under permutation of the data points.
    """
    n = jac.shape[1]
    jtj = np.empty((n, n))
    jtr = np.empty(n)
    for i in range(n):
        jtr[i] = _exact_sum(jac[:, i] * r)
        for j in range(i, n):
            jtj[i, j] = jtj[j, i] = _exact_sum(jac[:, i] * jac[:, j])
    return jtj, jtr, _exact_sum(r * r)


def lm_fit(model, x, y, p0, bounds=None, names=None, model_name="custom",
           max_iter: int = MAX_ITERATIONS) -> FitResult:
    """Levenberg-Marquardt least squares: minimize ||model(x, p) - y||^2.

    model(x, p) maps the independent variable and a parameter vector to
    predictions. ``bounds`` is an optional (lo, hi) pair of arrays; steps are
    projected onto the box. Damping multiplies the diagonal of J^T J
    (lambda_0 = 1e-3, x0.3 on accepted steps, x2 on rejections), which keeps
    the step scale-invariant across parameters of very different magnitudes.
    Stops when the relative cost decrease or the step norm falls below 1e-10,
    or after ``max_iter`` iterations (converged=False, best point returned).
    Deterministic for fixed inputs.
    """
    p = np.asarray(p0, dtype=float).copy()
    y = np.asarray(y, dtype=float)
    if y.size < p.size:
        raise ValueError(
            f"need at least as many data points ({y.size}) as parameters ({p.size})")
    if bounds is not None:
        lo = np.asarray(bounds[0], dtype=float)
        hi = np.asarray(bounds[1], dtype=float)
        if np.any(p < lo) or np.any(p > hi):
            raise ValueError("initial parameters must lie within bounds")
    else:
        lo = np.full(p.size, -np.inf)
        hi = np.full(p.size, np.inf)

    if names is None:
        names = [f"p{i}" for i in range(p.size)]

    def residual(q):
        return np.asarray(model(x, q), dtype=float) - y

    r = residual(p)
    jac = _jacobian(model, x, p)
    jtj, jtr, cost = _normal_equations(jac, r)
    history = [cost]
    lam = LAMBDA_INIT
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        diag = np.diag(jtj).copy()
        dmax = float(diag.max())
        if dmax <= 0.0:
            # gradient-free point: nothing to move, stationary by definition
            if iterations == 1 and np.linalg.norm(jtr) == 0 and cost > 0:
                raise FitError("singular normal equations at the start of the fit")
            converged = True
            break
        diag[diag == 0.0] = dmax  # freeze curvature-free directions instead
        damped = jtj + lam * np.diag(diag)
        try:
            step = np.linalg.solve(damped, -jtr)
        except np.linalg.LinAlgError:
            if iterations == 1:
                raise FitError("singular normal equations at the start of the fit")
            break
        trial = np.clip(p + step, lo, hi)
        step_norm = float(np.linalg.norm(trial - p))
        rt = residual(trial)
        cost_t = _exact_sum(rt * rt)
        if cost_t < cost:
            rel_dec = (cost - cost_t) / cost if cost > 0 else 0.0
            p, r, cost = trial, rt, cost_t
            history.append(cost)
            lam *= LAMBDA_ACCEPT
            jac = _jacobian(model, x, p)
            jtj, jtr, cost = _normal_equations(jac, r)
            if rel_dec < COST_TOL or step_norm < STEP_TOL or cost == 0.0:
                converged = True
                break
        else:
            lam *= LAMBDA_REJECT
            if step_norm < STEP_TOL:
                converged = True
                break

    dof = max(y.size - p.size, 1)
    variance = cost / dof
    stderr = np.full(p.size, np.nan)
    try:
        damped = jtj + lam * np.diag(np.diag(jtj))
        cov = np.linalg.inv(damped) * variance
        stderr = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        pass
    return FitResult(
        model=model_name,
        params={n: float(v) for n, v in zip(names, p)},
        stderr={n: float(s) for n, s in zip(names, stderr)},
        residual_norm=float(math.sqrt(cost)),
        iterations=iterations,
        converged=converged,
        cost_history=tuple(history),
    )


def odmr_model(freq_mhz, p):
    """baseline + sum of height-normalized Voigt peaks.

    p = [baseline, center_1, sigma_1, gamma_1, amplitude_1, center_2, ...].
    """
    freq = np.asarray(freq_mhz, dtype=float)
    out = np.full_like(freq, p[0])
    for k in range(1, len(p), 4):
        center, sigma, gamma, amp = p[k:k + 4]
        out = out + amp * voigt(freq - center, sigma, gamma) / voigt(0.0, sigma, gamma)
    return out


def _smooth(y: np.ndarray, window: int = 5) -> np.ndarray:
    # normalize by actual coverage so the edges are not biased downward
    kernel = np.ones(window)
    num = np.convolve(y, kernel, mode="same")
    den = np.convolve(np.ones_like(y), kernel, mode="same")
    return num / den


def _local_maxima(y: np.ndarray) -> list[int]:
    return [i for i in range(1, len(y) - 1)
            if y[i] > y[i - 1] and y[i] > y[i + 1]]


def _half_prominence_span(freq, smooth, i_peak, baseline) -> float:
    half = baseline + 0.5 * (smooth[i_peak] - baseline)
    left = i_peak
    while left > 0 and smooth[left - 1] >= half:
        left -= 1
    right = i_peak
    while right < len(smooth) - 1 and smooth[right + 1] >= half:
        right += 1
    return float(freq[right] - freq[left])


def fit_odmr(spectrum: OdmrSpectrum, n_peaks: int = 2,
             init: np.ndarray | None = None,
             max_iter: int = MAX_ITERATIONS) -> FitResult:
    """Fit baseline plus ``n_peaks`` Voigt peaks to a contrast spectrum.

    Auto-initialization: baseline from the median, peak centers from local
    maxima of the 5-point smoothed contrast ranked by prominence, widths from
    half the span of the region above half prominence. Raises
    FitInitializationError when fewer maxima than peaks are found.
    """
    if n_peaks not in (1, 2):
        raise ValueError(f"n_peaks must be 1 or 2, got {n_peaks}")
    freq = spectrum.freq_mhz
    y = spectrum.contrast
    if len(freq) < 8 * n_peaks:
        raise ValueError(
            f"need at least {8 * n_peaks} points for {n_peaks} peaks, got {len(freq)}")
    span = float(freq[-1] - freq[0])
    min_width = max(float(np.min(np.diff(freq))) * 1e-3, 1e-9)
    if init is None:
        baseline = float(np.median(y))
        smooth = _smooth(y)
        maxima = _local_maxima(smooth)
        maxima.sort(key=lambda i: smooth[i] - baseline, reverse=True)
        if len(maxima) < n_peaks:
            raise FitInitializationError(
                f"found {len(maxima)} candidate peaks, need {n_peaks}")
        chosen = sorted(maxima[:n_peaks], key=lambda i: freq[i])
        p0 = [baseline]
        for i in chosen:
            width = 0.5 * _half_prominence_span(freq, smooth, i, baseline)
            width = max(width / 2, min_width)
            p0 += [float(freq[i]), width, width, max(smooth[i] - baseline, 0.0)]
        p0 = np.asarray(p0)
    else:
        p0 = np.asarray(init, dtype=float)
        if len(p0) != 1 + 4 * n_peaks:
            raise ValueError(f"init must have {1 + 4 * n_peaks} entries")

    names = ["baseline"]
    lo = [-np.inf]
    hi = [np.inf]
    for k in range(1, n_peaks + 1):
        names += [f"center_{k}_mhz", f"sigma_{k}_mhz", f"gamma_{k}_mhz",
                  f"amplitude_{k}"]
        lo += [float(freq[0]), min_width, min_width, 0.0]
        hi += [float(freq[-1]), span, span, np.inf]
    return lm_fit(odmr_model, freq, y, p0, bounds=(lo, hi), names=names,
                  model_name=f"odmr_voigt_{n_peaks}", max_iter=max_iter)


def rabi_model(t_us, p):
    """Damped cosine -A cos(2 pi f t) exp(-t / T2*); p = [A, f_MHz, T2*_us]."""
    t = np.asarray(t_us, dtype=float)
    a, f, t2 = p
    return -a * np.cos(2 * np.pi * f * t) * np.exp(-t / t2)


def fit_rabi(trace: RabiTrace, init: np.ndarray | None = None,
             max_iter: int = MAX_ITERATIONS) -> FitResult:
    """Fit the damped-cosine Rabi model to a trace.

    Auto-initialization takes the Rabi frequency from the dominant nonzero
    bin of the DFT of the mean-subtracted trace, the contrast from the first
    sample, and the decay time from the trace span. An indistinct spectral
    peak (below twice the median bin magnitude) raises
    FitInitializationError.
    """
    t = trace.t_us
    y = trace.contrast
    if len(t) < 8:
        raise ValueError(f"need at least 8 points, got {len(t)}")
    if init is None:
        dt = float(np.mean(np.diff(t)))
        mags = np.abs(np.fft.rfft(y - y.mean()))
        freqs = np.fft.rfftfreq(len(t), dt)
        if len(mags) < 3:
            raise FitInitializationError("trace too short for spectral initialization")
        peak_bin = int(np.argmax(mags[1:])) + 1
        peak_mag = float(mags[peak_bin])
        median_mag = float(np.median(mags[1:]))
        if peak_mag <= 2 * median_mag:
            raise FitInitializationError(
                "no distinct oscillation found in the trace spectrum; "
                "supply init=(a_rabi, f_rabi_mhz, t2_star_us)")
        f0 = float(freqs[peak_bin])
        span = float(t[-1] - t[0])
        if span * f0 < 1.0:
            raise ValueError(
                f"trace spans {span * f0:.2f} oscillation periods, need >= 1")
        p0 = np.array([abs(float(y[0])), f0, span / 2])
    else:
        p0 = np.asarray(init, dtype=float)
        if len(p0) != 3:
            raise ValueError("init must be (a_rabi, f_rabi_mhz, t2_star_us)")
    span = float(t[-1] - t[0])
    # keep T2* where the exponential stays resolvable: shorter than one
    # sample step or far beyond the window would zero out its gradient
    dt = float(np.mean(np.diff(t)))
    lo = [0.0, 0.0, dt]
    hi = [np.inf, np.inf, 1e3 * span]
    p0[2] = min(max(p0[2], lo[2]), hi[2])
    return lm_fit(rabi_model, t, y, p0, bounds=(lo, hi),
                  names=["a_rabi", "f_rabi_mhz", "t2_star_us"],
                  model_name="rabi_damped_cosine", max_iter=max_iter)
