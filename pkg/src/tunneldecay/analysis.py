"""Fits and feature extraction on decay traces.

Decay laws: exponential P ~ e^{-gamma t} (g constant at -gamma) and Gaussian
P ~ e^{-t^2/tau} (g = -2t/tau).  Between the two laws lies the transition
period, where |g| typically overshoots the exponential rate; its peak, the
sign structure of g, crossings between scenarios, and the stage boundaries
are all extracted here from sampled traces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .observables import DecayTrace

# Stage windows used by the presets: the Gaussian law is fitted on the
# earliest samples, the exponential tail on [2.5, 3.5].  Both are plain
# defaults, overridable per call.
GAUSSIAN_WINDOW: tuple[float, float] = (0.0, 0.25)
EXPONENTIAL_WINDOW: tuple[float, float] = (2.5, 3.5)

MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class FitResult:
    """Least-squares decay-law fit over a time window.

    value is gamma for kind="exponential" (P ~ e^{-gamma t}) and tau for
    kind="gaussian" (P ~ e^{-t^2/tau}).  residual is the rms of the ln P
    residuals, comparable across windows; a fit against the wrong law shows
    up as a residual orders of magnitude above the right-law fit.
    """

    kind: Literal["exponential", "gaussian"]
    value: float
    window: tuple[float, float]
    residual: float

    def __post_init__(self) -> None:
        if self.window[1] <= self.window[0]:
            raise ValueError(f"empty fit window {self.window}")
        if self.residual < 0:
            raise ValueError("rms residual cannot be negative")

    @property
    def gamma(self) -> float:
        if self.kind != "exponential":
            raise AttributeError("gamma is only defined for exponential fits")
        return self.value

    @property
    def tau(self) -> float:
        if self.kind != "gaussian":
            raise AttributeError("tau is only defined for gaussian fits")
        return self.value


@dataclass(frozen=True)
class PhaseSegmentation:
    """Boundaries of the three decay stages; None marks an undetected stage."""

    gaussian_end: float | None
    exponential_start: float | None

    @property
    def transition(self) -> tuple[float | None, float | None]:
        return (self.gaussian_end, self.exponential_start)


def _series(trace: DecayTrace | tuple[NDArray, NDArray]) -> tuple[NDArray, NDArray]:
    if isinstance(trace, DecayTrace):
        return trace.t, trace.P
    t, p = trace
    return np.asarray(t, dtype=float), np.asarray(p, dtype=float)


def _g_series(trace: DecayTrace | tuple[NDArray, NDArray]) -> tuple[NDArray, NDArray]:
    if isinstance(trace, DecayTrace):
        return trace.t, trace.g
    t, g = trace
    return np.asarray(t, dtype=float), np.asarray(g, dtype=float)


def _window_samples(
    t: NDArray, p: NDArray, window: tuple[float, float]
) -> tuple[NDArray, NDArray]:
    lo, hi = window
    mask = (t >= lo) & (t <= hi) & (p > 0) & np.isfinite(p)
    if np.count_nonzero(mask) < MIN_FIT_SAMPLES:
        raise ValueError(
            f"fit window [{lo}, {hi}] holds {int(np.count_nonzero(mask))} usable samples; "
            f"need at least {MIN_FIT_SAMPLES}"
        )
    return t[mask], p[mask]


def fit_exponential(
    trace: DecayTrace | tuple[NDArray, NDArray],
    window: tuple[float, float] = EXPONENTIAL_WINDOW,
) -> FitResult:
    """Fit ln P = -gamma t + c on the window; returns gamma = -slope."""
    t, p = _series(trace)
    tw, pw = _window_samples(t, p, window)
    logp = np.log(pw)
    slope, intercept = np.polyfit(tw, logp, 1)
    resid = logp - (slope * tw + intercept)
    return FitResult(
        kind="exponential",
        value=float(-slope),
        window=window,
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def fit_gaussian(
    trace: DecayTrace | tuple[NDArray, NDArray],
    window: tuple[float, float] = GAUSSIAN_WINDOW,
) -> FitResult:
    """Fit ln P = -t^2/tau + c on the window; returns tau = -1/slope."""
    t, p = _series(trace)
    tw, pw = _window_samples(t, p, window)
    logp = np.log(pw)
    slope, intercept = np.polyfit(tw**2, logp, 1)
    if slope >= 0:
        raise ValueError(
            f"window [{window[0]}, {window[1]}] shows no Gaussian decay (ln P slope {slope:.3g} vs t^2)"
        )
    resid = logp - (slope * tw**2 + intercept)
    return FitResult(
        kind="gaussian",
        value=float(-1.0 / slope),
        window=window,
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def transition_peak(
    trace: DecayTrace | tuple[NDArray, NDArray], t_min: float = 0.1
) -> tuple[float, float]:
    """Location and signed value of the largest |g| at t >= t_min.

    The discrete argmax is refined with a 3-point parabola through |g|
    (ties resolved toward earlier t by the first-maximum convention); the
    refinement matters because g is sampled coarsely relative to its
    curvature near the peak.
    """
    t, g = _g_series(trace)
    mask = (t >= t_min) & np.isfinite(g)
    if not np.any(mask):
        raise ValueError(f"no finite g samples at t >= {t_min}")
    idx = np.flatnonzero(mask)
    absg = np.abs(g)
    k = idx[np.argmax(absg[idx])]
    t_star, g_star = float(t[k]), float(g[k])

    if idx[0] < k < idx[-1] and np.isfinite(g[k - 1]) and np.isfinite(g[k + 1]):
        y0, y1, y2 = absg[k - 1], absg[k], absg[k + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom < 0:  # proper local maximum of the parabola
            delta = 0.5 * (y0 - y2) / denom
            if abs(delta) <= 1.0:
                # uniform spacing assumed between the three bracketing samples
                dt_local = 0.5 * (t[k + 1] - t[k - 1])
                t_star = float(t[k] + delta * dt_local)
                peak = y1 - 0.25 * (y0 - y2) * delta
                g_star = float(np.sign(g[k]) * peak)
    return t_star, g_star


def positive_g_intervals(
    trace: DecayTrace | tuple[NDArray, NDArray],
) -> list[tuple[float, float]]:
    """Maximal sample runs with g > 0, as (t_first, t_last) pairs."""
    t, g = _g_series(trace)
    positive = np.isfinite(g) & (g > 0)
    intervals: list[tuple[float, float]] = []
    start: int | None = None
    for i, flag in enumerate(positive):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append((float(t[start]), float(t[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(t[start]), float(t[-1])))
    return intervals


def crossing_time(
    trace_a: DecayTrace | tuple[NDArray, NDArray],
    trace_b: DecayTrace | tuple[NDArray, NDArray],
    t_min: float = 0.1,
) -> tuple[float, float] | None:
    """First strict sign flip of P_A - P_B after t_min, linearly interpolated.

    Returns (t_cross, P_at_cross), or None when the sign never flips
    (identical traces included).  Both traces must share the sample grid.
    """
    ta, pa = _series(trace_a)
    tb, pb = _series(trace_b)
    if len(ta) != len(tb) or not np.allclose(ta, tb, rtol=0, atol=1e-12):
        raise ValueError("traces do not share a sampling grid")
    diff = pa - pb
    sign = np.sign(diff)
    for i in range(len(ta) - 1):
        if ta[i + 1] <= t_min:
            continue
        if sign[i] != 0 and sign[i + 1] != 0 and sign[i] != sign[i + 1]:
            frac = diff[i] / (diff[i] - diff[i + 1])
            t_c = float(ta[i] + frac * (ta[i + 1] - ta[i]))
            p_c = float(pa[i] + frac * (pa[i + 1] - pa[i]))
            return t_c, p_c
    return None


def segment_phases(
    trace: DecayTrace,
    gaussian_window: tuple[float, float] = GAUSSIAN_WINDOW,
    rel_tolerance: float = 0.2,
    tail_tolerance: float = 0.1,
    small_signal_fraction: float = 0.05,
    tail_fraction: float = 0.25,
) -> PhaseSegmentation:
    """Locate the end of the Gaussian stage and the start of the exponential one.

    gaussian_end: first sample where g departs from the fitted Gaussian law
    -2t/tau by more than rel_tolerance of the larger of |g| and the model,
    provided the departure also exceeds small_signal_fraction of the trace's
    peak |g| (without the small-signal guard the relative test fires where
    both curves are indistinguishable from zero).

    exponential_start: earliest sample time T such that every later sample
    keeps g within tail_tolerance of the tail median (median over the last
    tail_fraction of finite samples).  A trace that never settles, e.g. a
    pure Gaussian, has no such T because its final samples already violate
    the band; the stage is then reported as absent (None), never guessed.

    The thresholds are engineering constants, exposed as parameters.
    """
    t, g = trace.t, trace.g
    finite = np.isfinite(g)
    if np.count_nonzero(finite) < MIN_FIT_SAMPLES:
        raise ValueError("too few finite g samples to segment the trace")
    scale = float(np.max(np.abs(g[finite])))

    gaussian_end: float | None = None
    try:
        tau = fit_gaussian(trace, gaussian_window).tau
    except ValueError:
        tau = None
    if tau is not None and scale > 0:
        model = -2.0 * t / tau
        dev = np.abs(g - model)
        limit = np.maximum(
            rel_tolerance * np.maximum(np.abs(g), np.abs(model)),
            small_signal_fraction * scale,
        )
        hits = np.flatnonzero(finite & (t > 0) & (dev > limit))
        if len(hits):
            gaussian_end = float(t[hits[0]])

    exponential_start: float | None = None
    fin_idx = np.flatnonzero(finite)
    n_tail = max(3, int(np.ceil(tail_fraction * len(fin_idx))))
    tail_median = float(np.median(g[fin_idx[-n_tail:]]))
    if tail_median != 0:
        in_band = finite & (np.abs(g - tail_median) <= tail_tolerance * abs(tail_median))
        violations = np.flatnonzero(~in_band)
        if len(violations) == 0:
            exponential_start = float(t[0])
        elif violations[-1] < len(t) - 1:
            exponential_start = float(t[violations[-1] + 1])

    return PhaseSegmentation(gaussian_end=gaussian_end, exponential_start=exponential_start)
