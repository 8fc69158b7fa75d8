"""Shared fixtures: disk-cached production traces and the criterion report.

The acceptance tests need several full-resolution runs (50k cells, 8k-16k
steps); the slowest pair takes minutes of CPU.  cached_trace() memoizes each
run in tests/_cache keyed by the exact config text plus a hash of the
numerical sources, so editing the solver invalidates the cache but re-running
the suite does not repeat the integrations.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import pytest

from tunneldecay import model, propagator
from tunneldecay.observables import DecayTrace

_CACHE_DIR = Path(__file__).parent / "_cache"
_SRC_DIR = Path(__file__).parent.parent / "src" / "tunneldecay"

# files whose content determines trace values; analysis/io layers are not
# part of the key because they never touch the integration
_NUMERICAL_SOURCES = ("model.py", "operator.py", "propagator.py", "observables.py")


def _source_salt() -> str:
    digest = hashlib.sha256()
    for name in _NUMERICAL_SOURCES:
        digest.update((_SRC_DIR / name).read_bytes())
    return digest.hexdigest()[:16]


def cached_trace(cfg: model.ScenarioConfig) -> DecayTrace:
    config_text = model.format_config(cfg)
    key = hashlib.sha256((config_text + _source_salt()).encode()).hexdigest()[:24]
    path = _CACHE_DIR / f"{key}.npz"
    if path.exists():
        data = np.load(path)
        return DecayTrace(
            t=data["t"],
            P=data["P"],
            g=data["g"],
            j_a=data["j_a"],
            norm=data["norm"],
            energy=data["energy"],
            cfg=model.parse_config_text(str(data["config"])),
        )
    trace = propagator.run(cfg)
    _CACHE_DIR.mkdir(exist_ok=True)
    np.savez(
        path,
        t=trace.t,
        P=trace.P,
        g=trace.g,
        j_a=trace.j_a,
        norm=trace.norm,
        energy=trace.energy,
        config=np.array(config_text),
    )
    return trace


def _barrier_config(h: float, w: float, **overrides) -> model.ScenarioConfig:
    return model.DEFAULT_CONFIG.with_overrides(
        barrier=model.BarrierSpec(h=h, w=w), **overrides
    )


@pytest.fixture(scope="session")
def fig1_trace() -> DecayTrace:
    return cached_trace(_barrier_config(10.0, 0.6))


@pytest.fixture(scope="session")
def h20_trace() -> DecayTrace:
    return cached_trace(_barrier_config(20.0, 0.6))


@pytest.fixture(scope="session")
def h30_trace() -> DecayTrace:
    return cached_trace(_barrier_config(30.0, 0.6))


@pytest.fixture(scope="session")
def narrow_trace() -> DecayTrace:
    return cached_trace(_barrier_config(10.0, 0.2))


@pytest.fixture(scope="session")
def nobarrier_trace() -> DecayTrace:
    return cached_trace(model.DEFAULT_CONFIG.with_overrides(barrier=None))


# -- acceptance criterion report ------------------------------------------

_criterion_lines: list[str] = []


@pytest.fixture
def record_criterion():
    def _record(number: int, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        _criterion_lines.append(f"criterion {number:>2}  {status}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter) -> None:
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
