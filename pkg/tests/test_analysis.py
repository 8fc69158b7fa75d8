from __future__ import annotations

import numpy as np
import pytest

from tunneldecay import analysis, model
from tunneldecay.observables import DecayTrace


def _trace_from_rate(t: np.ndarray, g: np.ndarray) -> DecayTrace:
    """Build a consistent trace whose P integrates the given log-rate."""
    log_p = np.concatenate(([0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))))
    p = np.exp(log_p)
    return DecayTrace(
        t=t,
        P=p,
        g=g,
        j_a=-g * p,
        norm=np.ones(len(t)),
        energy=np.full(len(t), np.pi**2, dtype=complex),
        cfg=model.DEFAULT_CONFIG,
    )


def _exp_series(gamma: float, n: int = 801, t_end: float = 4.0):
    t = np.linspace(0.0, t_end, n)
    return t, np.exp(-gamma * t)


def test_fit_exponential_recovers_rate():
    t, p = _exp_series(0.5)
    fit = analysis.fit_exponential((t, p))
    assert fit.kind == "exponential"
    assert fit.value == pytest.approx(0.5, rel=1e-12)
    assert fit.residual < 1e-12
    assert fit.gamma == fit.value
    with pytest.raises(AttributeError, match="gaussian"):
        fit.tau


def test_fit_exponential_honors_window():
    # piecewise rate: 0.1 before t=2, 0.5 after (continuous at the joint)
    t = np.linspace(0.0, 4.0, 2001)
    p = np.where(t < 2.0, np.exp(-0.1 * t), np.exp(0.8 - 0.5 * t))
    fit = analysis.fit_exponential((t, p), window=(2.5, 3.5))
    assert fit.value == pytest.approx(0.5, rel=1e-9)
    early = analysis.fit_exponential((t, p), window=(0.0, 1.5))
    assert early.value == pytest.approx(0.1, rel=1e-9)


def test_fit_exponential_needs_enough_samples():
    t, p = _exp_series(0.5, n=9, t_end=0.1)
    with pytest.raises(ValueError, match="usable samples"):
        analysis.fit_exponential((t, p), window=(0.0, 0.01))


def test_fit_gaussian_recovers_timescale():
    t = np.linspace(0.0, 0.5, 501)
    p = np.exp(-(t**2) / 0.3)
    fit = analysis.fit_gaussian((t, p), window=(0.0, 0.25))
    assert fit.kind == "gaussian"
    assert fit.value == pytest.approx(0.3, rel=1e-10)
    assert fit.tau == fit.value
    with pytest.raises(AttributeError, match="exponential"):
        fit.gamma
    with pytest.raises(ValueError, match="no Gaussian decay"):
        analysis.fit_gaussian((t, np.exp(+(t**2) / 0.3)), window=(0.0, 0.25))


def test_transition_peak_with_parabolic_refinement():
    t = np.linspace(0.0, 4.0, 801)
    g = -1.5 * np.exp(-2.0 * (t - 0.602) ** 2)
    t_star, g_star = analysis.transition_peak((t, g))
    assert t_star == pytest.approx(0.602, abs=2e-4)
    assert g_star == pytest.approx(-1.5, rel=1e-4)


def test_transition_peak_ignores_early_times():
    t = np.linspace(0.0, 4.0, 801)
    g = np.where(t < 0.05, -10.0, -np.exp(-((t - 1.0) ** 2)))
    t_star, _ = analysis.transition_peak((t, g), t_min=0.1)
    assert t_star == pytest.approx(1.0, abs=1e-6)


def test_transition_peak_requires_finite_samples():
    t = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ValueError, match="finite"):
        analysis.transition_peak((t, np.full(11, np.nan)))


def test_positive_intervals_found_and_merged():
    t = np.linspace(0.0, 1.0, 11)
    g = np.array([-1, -1, 1, 1, -1, np.nan, 1, -1, -1, 1, 1], dtype=float)
    intervals = analysis.positive_g_intervals((t, g))
    assert np.allclose(intervals, [(0.2, 0.3), (0.6, 0.6), (0.9, 1.0)])
    assert analysis.positive_g_intervals((t, -np.ones(11))) == []


def test_crossing_time_linear_interpolation():
    t = np.linspace(0.0, 2.0, 201)
    pa = np.exp(-1.0 * t)
    pb = np.exp(-0.5 * t) * 0.8
    crossing = analysis.crossing_time((t, pa), (t, pb))
    assert crossing is not None
    t_c, p_c = crossing
    # analytic crossing: e^{-t} = 0.8 e^{-t/2} -> t = 2 ln(1/0.8)
    assert t_c == pytest.approx(2 * np.log(1.25), abs=1e-4)
    assert p_c == pytest.approx(np.exp(-2 * np.log(1.25)), abs=1e-4)


def test_crossing_time_none_when_ordered():
    t = np.linspace(0.0, 1.0, 51)
    assert analysis.crossing_time((t, np.exp(-t)), (t, 0.5 * np.exp(-t))) is None


def test_crossing_time_requires_shared_grid():
    t = np.linspace(0.0, 1.0, 51)
    with pytest.raises(ValueError, match="grid"):
        analysis.crossing_time((t, np.exp(-t)), (t + 1e-3, np.exp(-t)))


def test_segment_phases_on_three_stage_model():
    # Gaussian start, smooth crossover, exponential tail: the canonical shape.
    # The crossover is sharp relative to the early fit window, so the fitted
    # Gaussian law is uncontaminated and the departure lands near the blend.
    t = np.linspace(0.0, 4.0, 2001)
    tau, gamma = 2.4, 0.5
    blend = 0.5 * (1 + np.tanh((t - 0.6) / 0.1))
    g = (1 - blend) * (-2.0 * t / tau) + blend * (-gamma - 0.3 * np.exp(-3.0 * (t - 0.6) ** 2))
    seg = analysis.segment_phases(_trace_from_rate(t, g))
    assert seg.gaussian_end is not None and 0.1 < seg.gaussian_end < 0.7
    assert seg.exponential_start is not None and 0.7 < seg.exponential_start < 2.8
    assert seg.transition == (seg.gaussian_end, seg.exponential_start)


def test_segment_phases_pure_gaussian_has_no_tail():
    t = np.linspace(0.0, 4.0, 2001)
    seg = analysis.segment_phases(_trace_from_rate(t, -2.0 * t / 2.4))
    assert seg.exponential_start is None
