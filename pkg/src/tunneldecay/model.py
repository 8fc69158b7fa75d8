"""Problem geometry and run configuration for 1D barrier-decay simulations.

Units are fixed so that hbar = 1 and 2m = 1: the Schrodinger equation reads
i dphi/dt = (-d2/dx2 + V(x)) phi on [0, x_max] with phi pinned to zero at
both walls.  The potential is a square barrier of height h on [1, 1+w],
optionally augmented by a negative imaginary absorbing ramp near x_max that
soaks up outgoing flux.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

# Relative tolerance used when snapping a coordinate onto the grid.
GRID_ALIGNMENT_RTOL = 1e-9

# Samples with nonescape probability below this are treated as numerical
# noise by the log-derivative estimator (see observables.log_derivative).
PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform spatial grid on [0, x_max] with Dirichlet walls.

    Interior points sit at x_i = i*dx, i = 1..n_cells-1, dx = x_max/n_cells.
    The wavefunction is stored on interior points only; the wall values are
    identically zero and never stored.
    """

    x_max: float = 500.0
    n_cells: int = 50_000

    def __post_init__(self) -> None:
        if not np.isfinite(self.x_max) or self.x_max <= 0:
            raise ValueError(f"x_max must be positive and finite, got {self.x_max}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 16:
            raise ValueError(f"n_cells must be an integer >= 16, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return self.x_max / self.n_cells

    @property
    def n_interior(self) -> int:
        return self.n_cells - 1

    def interior_points(self) -> NDArray[np.float64]:
        # i*x_max/n_cells (integer product first) rounds once, unlike i*dx.
        return np.arange(1.0, self.n_cells) * self.x_max / self.n_cells

    def is_on_grid(self, x: float) -> bool:
        i = round(x * self.n_cells / self.x_max)
        if i < 0 or i > self.n_cells:
            return False
        return abs(i * self.x_max / self.n_cells - x) <= GRID_ALIGNMENT_RTOL * max(1.0, abs(x))

    def index_of(self, x: float, label: str = "coordinate") -> int:
        """Grid index i with x_i == x, or ValueError naming the coordinate."""
        i = round(x * self.n_cells / self.x_max)
        if not self.is_on_grid(x):
            raise ValueError(
                f"{label} x={x!r} does not lie on the grid (dx={self.dx!r}); "
                f"nearest grid point is {i * self.x_max / self.n_cells!r}"
            )
        return i


@dataclass(frozen=True)
class BarrierSpec:
    """Square barrier of height h on [1, 1+w]; h=0 encodes no barrier."""

    h: float = 10.0
    w: float = 0.6
    inner_edge: float = field(default=1.0, init=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.h) or self.h < 0:
            raise ValueError(f"barrier height must be >= 0, got {self.h}")
        if not np.isfinite(self.w) or self.w <= 0:
            raise ValueError(f"barrier width must be > 0, got {self.w}")

    @property
    def outer_edge(self) -> float:
        return self.inner_edge + self.w


@dataclass(frozen=True)
class AbsorberSpec:
    """Polynomial complex absorbing ramp on [x_start, x_max].

    Contributes -i*strength*((x - x_start)/(x_max - x_start))**power for
    x >= x_start and nothing below.  The ramp starts at zero and grows
    smoothly, which keeps its own reflection small.
    """

    x_start: float = 490.0
    strength: float = 5.0
    power: int = 2

    def __post_init__(self) -> None:
        if not np.isfinite(self.x_start):
            raise ValueError(f"absorber start must be finite, got {self.x_start}")
        if not np.isfinite(self.strength) or self.strength <= 0:
            raise ValueError(f"absorber strength must be > 0, got {self.strength}")
        if self.power not in (2, 3, 4):
            raise ValueError(f"absorber power must be one of 2, 3, 4, got {self.power}")


@dataclass
class WaveFunction:
    """Complex field on the interior grid points at one instant."""

    values: NDArray[np.complex128]
    t: float


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one propagation run."""

    grid: GridSpec = GridSpec()
    barrier: BarrierSpec | None = BarrierSpec()
    absorber: AbsorberSpec | None = AbsorberSpec()
    dt: float = 5e-4
    t_end: float = 4.0
    a: float = 4.0
    sample_stride: int = 10

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


DEFAULT_CONFIG = ScenarioConfig()


def sample_potential(
    grid: GridSpec,
    barrier: BarrierSpec | None,
    absorber: AbsorberSpec | None,
) -> NDArray[np.complex128]:
    """Potential V(x_i) - i*Gamma(x_i) sampled on the interior points.

    The barrier is h strictly inside (1, 1+w); the two edge nodes carry h/2.
    Edge averaging keeps the discrete barrier centered on [1, 1+w]: assigning
    full height to one edge node shifts the effective barrier by dx/2, an
    O(dx) bias that dominates the error of every decay observable and breaks
    second-order self-convergence.  With averaged edges the effective edges
    sit on the nominal positions to O(dx^2).

    Raises ValueError when a barrier edge or the absorber start does not lie
    on the grid.
    """
    v = np.zeros(grid.n_interior, dtype=np.complex128)
    if barrier is not None and barrier.h != 0.0:
        i_lo = grid.index_of(barrier.inner_edge, "barrier inner edge")
        i_hi = grid.index_of(barrier.outer_edge, "barrier outer edge")
        # interior node i is stored at array slot i-1
        v[i_lo - 1 : i_hi] = barrier.h
        v[i_lo - 1] = 0.5 * barrier.h
        v[i_hi - 1] = 0.5 * barrier.h
    if absorber is not None:
        i_abs = grid.index_of(absorber.x_start, "absorber start")
        if absorber.x_start >= grid.x_max:
            raise ValueError(
                f"absorber start {absorber.x_start} must lie below x_max {grid.x_max}"
            )
        x = grid.interior_points()
        ramp = (x[i_abs - 1 :] - absorber.x_start) / (grid.x_max - absorber.x_start)
        np.clip(ramp, 0.0, None, out=ramp)
        v[i_abs - 1 :] -= 1j * absorber.strength * ramp**absorber.power
    return v


def initial_wavefunction(grid: GridSpec) -> WaveFunction:
    """Ground state of the inner box: sqrt(2)*sin(pi*x) on (0, 1], zero beyond.

    The state is renormalized to discrete norm one under the trapezoid rule,
    so the nonescape probability at t=0 is exactly 1 by construction.
    """
    grid.index_of(1.0, "initial-state support edge")
    x = grid.interior_points()
    values = np.where(x <= 1.0, np.sqrt(2.0) * np.sin(np.pi * np.minimum(x, 1.0)), 0.0)
    values = values.astype(np.complex128)
    norm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.dx)
    values /= norm
    return WaveFunction(values=values, t=0.0)


def validate_config(cfg: ScenarioConfig) -> list[str]:
    """Collect every violated invariant; an empty list means the config is ok.

    Pure function: nothing is raised and nothing is mutated, so callers can
    report all problems at once.
    """
    violations: list[str] = []
    grid = cfg.grid

    if not np.isfinite(cfg.dt) or cfg.dt <= 0:
        violations.append(f"dt must be > 0, got {cfg.dt}")
    if not np.isfinite(cfg.t_end) or cfg.t_end < 0:
        violations.append(f"t_end must be >= 0, got {cfg.t_end}")
    elif cfg.dt > 0:
        steps = cfg.t_end / cfg.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            violations.append(
                f"t_end={cfg.t_end} is not an integer number of steps of dt={cfg.dt}"
            )
        elif round(steps) > 10_000_000:
            violations.append(f"run of {round(steps)} steps exceeds the 1e7 step limit")
    if int(cfg.sample_stride) != cfg.sample_stride or cfg.sample_stride < 1:
        violations.append(f"sample_stride must be a positive integer, got {cfg.sample_stride}")

    if not grid.is_on_grid(cfg.a):
        violations.append(f"probe point a={cfg.a} is not a grid point")
    if cfg.barrier is not None:
        if not grid.is_on_grid(cfg.barrier.inner_edge):
            violations.append(f"barrier inner edge {cfg.barrier.inner_edge} is not a grid point")
        if not grid.is_on_grid(cfg.barrier.outer_edge):
            violations.append(f"barrier outer edge {cfg.barrier.outer_edge} is not a grid point")
        if cfg.a < cfg.barrier.outer_edge:
            violations.append(
                f"a < 1+w: probe point a={cfg.a} lies inside the barrier "
                f"(outer edge {cfg.barrier.outer_edge})"
            )
    if cfg.absorber is not None:
        if not grid.is_on_grid(cfg.absorber.x_start):
            violations.append(f"absorber start {cfg.absorber.x_start} is not a grid point")
        if cfg.absorber.x_start >= grid.x_max:
            violations.append(
                f"absorber start {cfg.absorber.x_start} must lie below x_max {grid.x_max}"
            )
        if cfg.a > cfg.absorber.x_start:
            violations.append(
                f"probe point a={cfg.a} must not exceed absorber start {cfg.absorber.x_start}"
            )
        if cfg.barrier is not None and cfg.barrier.outer_edge >= cfg.absorber.x_start:
            violations.append(
                f"barrier outer edge {cfg.barrier.outer_edge} must lie below "
                f"absorber start {cfg.absorber.x_start}"
            )
    else:
        if cfg.a >= grid.x_max:
            violations.append(f"probe point a={cfg.a} must lie below x_max {grid.x_max}")
    return violations


# --- config file round-trip ------------------------------------------------

CONFIG_KEYS = (
    "x_max",
    "n_cells",
    "dt",
    "t_end",
    "barrier_height",
    "barrier_width",
    "absorber_start",
    "absorber_strength",
    "absorber_power",
    "probe_a",
    "sample_stride",
)

_INT_KEYS = {"n_cells", "absorber_power", "sample_stride"}


def config_to_mapping(cfg: ScenarioConfig) -> dict[str, float | int]:
    """Flatten a ScenarioConfig to the key=value vocabulary (round-trippable)."""
    barrier = cfg.barrier if cfg.barrier is not None else BarrierSpec(h=0.0, w=0.6)
    absorber = cfg.absorber
    return {
        "x_max": cfg.grid.x_max,
        "n_cells": cfg.grid.n_cells,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "barrier_height": barrier.h,
        "barrier_width": barrier.w,
        "absorber_start": absorber.x_start if absorber else 490.0,
        "absorber_strength": absorber.strength if absorber else 0.0,
        "absorber_power": absorber.power if absorber else 2,
        "probe_a": cfg.a,
        "sample_stride": cfg.sample_stride,
    }


def config_from_mapping(values: dict[str, float | int]) -> ScenarioConfig:
    """Build a ScenarioConfig from key=value overrides on top of the defaults.

    barrier_height=0 turns the barrier off; absorber_strength=0 turns the
    absorber off (the specs themselves require positive values, so "off" is
    represented by absence rather than by a degenerate spec).
    """
    merged = config_to_mapping(DEFAULT_CONFIG)
    for key, value in values.items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
        merged[key] = value

    grid = GridSpec(x_max=float(merged["x_max"]), n_cells=int(merged["n_cells"]))
    h = float(merged["barrier_height"])
    barrier = None if h == 0.0 else BarrierSpec(h=h, w=float(merged["barrier_width"]))
    strength = float(merged["absorber_strength"])
    absorber = (
        None
        if strength == 0.0
        else AbsorberSpec(
            x_start=float(merged["absorber_start"]),
            strength=strength,
            power=int(merged["absorber_power"]),
        )
    )
    return ScenarioConfig(
        grid=grid,
        barrier=barrier,
        absorber=absorber,
        dt=float(merged["dt"]),
        t_end=float(merged["t_end"]),
        a=float(merged["probe_a"]),
        sample_stride=int(merged["sample_stride"]),
    )


def parse_config_values(text: str) -> dict[str, float | int]:
    """Parse flat key=value text into a mapping; '#' starts a comment."""
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(
                f"line {lineno}: unknown config key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}"
            )
        if key in values:
            raise ValueError(f"line {lineno}: duplicate config key {key!r}")
        try:
            values[key] = coerce_config_value(key, value)
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse value {value!r} for key {key!r}") from None
    return values


def coerce_config_value(key: str, value: str) -> float | int:
    """Parse one config value string with the type its key requires."""
    if key not in CONFIG_KEYS:
        raise ValueError(f"unknown config key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
    return int(value) if key in _INT_KEYS else float(value)


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse flat key=value text; unknown or duplicate keys rejected."""
    return config_from_mapping(parse_config_values(text))


def load_config(path: str | Path) -> ScenarioConfig:
    return parse_config_text(Path(path).read_text())


def format_config(cfg: ScenarioConfig) -> str:
    """Render a config as key=value lines (inverse of parse_config_text)."""
    mapping = config_to_mapping(cfg)
    lines = [f"{key}={mapping[key]!r}" for key in CONFIG_KEYS]
    return "\n".join(lines) + "\n"
