"""Front-fixing implicit steppers for the two phases.

Each phase is mapped onto a fixed unit interval in space: the liquid by
v1 = x / (p * tau**(alpha/2)), which pins the moving front at v1 = 1, the
solid by v2 = (x - S) / (L - S), which pins it at v2 = 0 and the truncated
far boundary at v2 = 1.  On the resulting uniform (v, tau) grid an
auxiliary scaling of the temperature turns each governing equation into an
implicit scheme whose right-hand side carries the full memory of earlier
levels through the product-trapezoidal weights.

The front coefficient p enters the grid itself: the time step is
dtau = 1 / (n * p**(2/alpha)), so the prescribed front reaches x = 1
exactly at the final level.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels, backend
from .analytic import PhysicalParams
from .errors import (
    DegenerateInputError,
    InvalidInputError,
    InvalidStateError,
    ZeroPivotError,
)
from .fracquad import trap_weights

__all__ = [
    "MeshConfig",
    "PhaseGrid",
    "RecoveredField",
    "TridiagonalSystem",
    "advance_phase",
    "assemble_phase1_step",
    "assemble_phase2_step",
    "make_phase_grid",
    "recover_physical",
    "thomas_solve",
    "transform_v1",
    "transform_v2",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshConfig:
    """Grid resolution and domain-truncation settings.

    ratio is the truncated solid extent L relative to the reference length;
    tau0_factor places the artificial start time tau_0 = tau0_factor * dtau
    strictly inside the first step, small enough not to distort the memory
    sums yet far enough from zero that the tau**(-alpha) boundary data stays
    finite.
    """

    m1: int = 100
    m2: int = 500
    n: int = 400
    ratio: float = 10.0
    tau0_factor: float = 1e-3

    def __post_init__(self):
        problems = []
        for name in ("m1", "m2", "n"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.ratio > 1.0:
            problems.append(f"ratio must be > 1, got {self.ratio}")
        if not 0.0 < self.tau0_factor < 1.0:
            problems.append(f"tau0_factor must be in (0, 1), got {self.tau0_factor}")
        if problems:
            raise InvalidInputError("; ".join(problems))


@dataclass
class PhaseGrid:
    """Auxiliary-function values of one phase on the fixed (v, tau) rectangle."""

    phase: int
    p: float
    mesh: MeshConfig
    params: PhysicalParams
    dtau: float
    tau: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    ubar: np.ndarray = field(repr=False)
    filled_through: int = 0

    @property
    def m(self) -> int:
        return self.mesh.m1 if self.phase == 1 else self.mesh.m2

    @property
    def dv(self) -> float:
        return 1.0 / self.m


class RecoveredField(NamedTuple):
    """Physical-space samples aligned with the grid: tau[j], x[j, i], u[j, i]."""

    tau: np.ndarray
    x: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class TridiagonalSystem:
    """One implicit step: sub/diag/super diagonals and right-hand side."""

    sub: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    size: int
    dominance_violations: int = 0


def transform_v1(x: float, tau: float, p: float, alpha: float) -> float:
    """Liquid-phase similarity coordinate x / (p * tau**(alpha/2))."""
    if tau <= 0.0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    return x / (p * tau ** (alpha / 2.0))


def transform_v2(x: float, tau: float, p: float, alpha: float, L: float) -> float:
    """Solid-phase coordinate (x - S) / (L - S); front at 0, truncation at 1."""
    if tau <= 0.0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    front = p * tau ** (alpha / 2.0)
    if L <= front:
        raise DegenerateInputError(
            f"front {front:.6g} reached the truncated boundary L={L} at tau={tau}"
        )
    return (x - front) / (L - front)


def _tau_grid(mesh: MeshConfig, dtau: float) -> np.ndarray:
    tau = np.empty(mesh.n + 1)
    tau[0] = mesh.tau0_factor * dtau
    tau[1:] = dtau * np.arange(1, mesh.n + 1, dtype=np.float64)
    return tau


def make_phase_grid(phase: int, p: float, mesh: MeshConfig,
                    params: PhysicalParams) -> PhaseGrid:
    """Allocate one phase grid with initial and boundary rows populated.

    The corner nodes where the initial and boundary data disagree take the
    initial value: the liquid grid starts all-zero (no liquid yet), and the
    solid grid starts at the far-field value except at the interface node.
    """
    if phase not in (1, 2):
        raise InvalidInputError(f"phase must be 1 or 2, got {phase}")
    if not p > 0.0:
        raise InvalidInputError(f"front coefficient must be > 0, got {p}")
    m = mesh.m1 if phase == 1 else mesh.m2
    if m < 2:
        raise InvalidInputError(
            f"phase {phase} needs at least one interior node, got m={m}"
        )
    a = params.alpha
    dtau = 1.0 / (mesh.n * p ** (2.0 / a))
    tau = _tau_grid(mesh, dtau)
    v = np.linspace(0.0, 1.0, m + 1)
    ubar = np.zeros((mesh.n + 1, m + 1))
    if phase == 1:
        ubar[1:, 0] = tau[1:] ** (-a)
    else:
        L = mesh.ratio
        width = L - p * tau ** (a / 2.0)
        if width.min() <= 0.0:
            raise DegenerateInputError(
                f"front reaches the truncated boundary L={L} within the grid "
                f"(p={p}, alpha={a})"
            )
        ubar[0, 1:] = params.theta_inf / width[0] ** 2
        ubar[1:, m] = params.theta_inf / width[1:] ** 2
    return PhaseGrid(phase=phase, p=p, mesh=mesh, params=params,
                     dtau=dtau, tau=tau, v=v, ubar=ubar)


def _phase_coeffs(grid: PhaseGrid):
    """Per-grid constants feeding the generic implicit step.

    Returns (tcoef, rfac, qfac_in, gq, init_mult): the time coefficient on
    the diagonal, the memory prefactor, the per-interior-node advective
    factor, the per-level advective time factor (zero at level 0, which the
    history sums skip), and the multiplier on the initial row.
    """
    a = grid.params.alpha
    p = grid.p
    tau = grid.tau
    dv = grid.dv
    if grid.phase == 1:
        tcoef = tau ** a
        rfac = grid.params.kappa1 / (p * p * math.gamma(a) * dv * dv)
        qfac_in = a * np.arange(1, grid.m, dtype=np.float64) * grid.dtau / 4.0
        gq = np.empty_like(tau)
        gq[0] = 0.0
        gq[1:] = tau[1:] ** (a - 1.0)
        init_mult = tau[0] ** a
    else:
        L = grid.mesh.ratio
        width = L - p * tau ** (a / 2.0)
        tcoef = width ** 2
        rfac = grid.params.kappa2 / (math.gamma(a) * dv * dv)
        vi = grid.v[1:-1]
        qfac_in = a * p * (vi - 1.0) * grid.dtau / (4.0 * dv)
        gq = np.empty_like(tau)
        gq[0] = 0.0
        gq[1:] = p * tau[1:] ** (a - 1.0) - L * tau[1:] ** (a / 2.0 - 1.0)
        init_mult = width[0] ** 2
    return tcoef, rfac, qfac_in, gq, init_mult


def _assemble_step(grid: PhaseGrid, k: int) -> TridiagonalSystem:
    if k < 0 or k >= grid.mesh.n:
        raise InvalidInputError(f"time index must lie in [0, {grid.mesh.n - 1}], got {k}")
    if grid.filled_through < k:
        raise InvalidStateError(
            f"phase {grid.phase} grid holds rows through {grid.filled_through}, "
            f"cannot assemble step targeting level {k + 1}"
        )
    tcoef, rfac, qfac_in, gq, init_mult = _phase_coeffs(grid)
    c = trap_weights(k, grid.params.alpha, grid.dtau).c
    sub, diag, sup, rhs, violations = _kernels.step_system(
        grid.ubar, k, tcoef, rfac, qfac_in, gq, init_mult, c
    )
    if violations:
        logger.warning(
            "diagonal dominance violated on %d of %d rows (phase %d, level %d)",
            violations, grid.m - 1, grid.phase, k + 1,
        )
    return TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs,
                             size=grid.m - 1, dominance_violations=violations)


def assemble_phase1_step(grid: PhaseGrid, k: int) -> TridiagonalSystem:
    """Implicit system advancing the liquid grid to time level k+1."""
    if grid.phase != 1:
        raise InvalidInputError(f"expected a phase-1 grid, got phase {grid.phase}")
    return _assemble_step(grid, k)


def assemble_phase2_step(grid: PhaseGrid, k: int) -> TridiagonalSystem:
    """Implicit system advancing the solid grid to time level k+1."""
    if grid.phase != 2:
        raise InvalidInputError(f"expected a phase-2 grid, got phase {grid.phase}")
    return _assemble_step(grid, k)


def thomas_solve(system: TridiagonalSystem):
    """Solve one assembled tridiagonal system in O(size)."""
    if system.size < 1:
        raise InvalidInputError(f"system size must be >= 1, got {system.size}")
    return _kernels.thomas(system.sub, system.diag, system.sup, system.rhs)


def advance_phase(grid: PhaseGrid, through: int | None = None) -> PhaseGrid:
    """Populate grid rows 1..through (default: all) in place.

    Dispatches to the active backend kernel; both backends realize the same
    repeated assemble + Thomas-solve recursion.  Recomputes from level 0,
    so the result is independent of any previous partial advance.
    """
    n = grid.mesh.n
    if through is None:
        through = n
    if not 1 <= through <= n:
        raise InvalidInputError(f"through must lie in [1, {n}], got {through}")
    tcoef, rfac, qfac_in, gq, init_mult = _phase_coeffs(grid)
    impl = backend.advance_impl()
    try:
        violations = impl(grid.ubar, tcoef, rfac, qfac_in, gq, init_mult,
                          grid.params.alpha, grid.dtau, through)
    except ZeroPivotError as exc:
        raise ZeroPivotError(f"phase {grid.phase}, p={grid.p:.6g}: {exc}") from exc
    if violations:
        logger.warning(
            "diagonal dominance violated %d times while advancing phase %d (p=%.6g)",
            violations, grid.phase, grid.p,
        )
    if not np.isfinite(grid.ubar[:through + 1]).all():
        raise InvalidStateError(
            f"non-finite values while advancing phase {grid.phase} (p={grid.p:.6g})"
        )
    grid.filled_through = through
    return grid


def recover_physical(grid: PhaseGrid) -> RecoveredField:
    """Undo the auxiliary scaling and the front-fixing map, all levels at once."""
    a = grid.params.alpha
    front = grid.p * grid.tau ** (a / 2.0)
    if grid.phase == 1:
        u = grid.ubar * (grid.tau ** a)[:, None]
        x = grid.v[None, :] * front[:, None]
    else:
        width = grid.mesh.ratio - front
        u = grid.ubar * (width ** 2)[:, None]
        x = grid.v[None, :] * width[:, None] + front[:, None]
    return RecoveredField(tau=grid.tau, x=x, u=u)
