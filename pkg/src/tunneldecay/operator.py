"""Discrete Hamiltonian H = -d2/dx2 + V(x) as a symmetric tridiagonal operator.

The 3-point Laplacian with Dirichlet walls is represented by its diagonal
(2/dx^2 + V(x_i)) and a single off-diagonal array (-1/dx^2), shared by the
sub- and super-diagonal.  With the absorber on, the diagonal picks up a
negative imaginary part at x >= x_start and the operator stops being
Hermitian by design: that is how outgoing flux is removed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .model import AbsorberSpec, BarrierSpec, GridSpec, WaveFunction, sample_potential


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: NDArray[np.complex128]
    off: NDArray[np.complex128]
    dx: float

    def __post_init__(self) -> None:
        if self.diag.ndim != 1 or self.off.ndim != 1:
            raise ValueError("diag and off must be one-dimensional")
        if len(self.off) != len(self.diag) - 1:
            raise ValueError(
                f"off-diagonal length {len(self.off)} must be diag length {len(self.diag)} - 1"
            )
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")

    @property
    def n(self) -> int:
        return len(self.diag)


def build_hamiltonian(
    grid: GridSpec,
    barrier: BarrierSpec | None,
    absorber: AbsorberSpec | None,
) -> TridiagonalOperator:
    """Assemble H on the interior points of the grid."""
    dx = grid.dx
    v = sample_potential(grid, barrier, absorber)
    diag = 2.0 / dx**2 + v
    off = np.full(grid.n_interior - 1, -1.0 / dx**2, dtype=np.complex128)
    return TridiagonalOperator(diag=diag, off=off, dx=dx)


def _values(psi: WaveFunction | NDArray[np.complex128]) -> NDArray[np.complex128]:
    return psi.values if isinstance(psi, WaveFunction) else np.asarray(psi)


def apply(op: TridiagonalOperator, psi: WaveFunction | NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Matrix-vector product (H psi)_i with implicit zeros beyond both walls."""
    values = _values(psi)
    if len(values) != op.n:
        raise ValueError(f"wavefunction length {len(values)} does not match operator size {op.n}")
    out = op.diag * values
    out[:-1] += op.off * values[1:]
    out[1:] += op.off * values[:-1]
    return out


def energy_expectation(
    op: TridiagonalOperator, psi: WaveFunction | NDArray[np.complex128]
) -> complex:
    """Trapezoid quadrature of psi* (H psi); real up to rounding while the
    state has no support on the absorber ramp."""
    values = _values(psi)
    return complex(op.dx * np.vdot(values, apply(op, values)))
