"""Front-coefficient search on the discrete interface energy balance.

Integrating the interface condition in time and discretizing the one-sided
heat fluxes on the recovered physical grids gives a computable front
position S(tau_n) for any candidate p.  The grid construction makes the
prescribed front hit x = 1 exactly at the final level, so the residual
1 - S(tau_n, p) vanishes at the consistent coefficient; bisection on that
residual is the search.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import PhysicalParams
from .errors import FracStefanError, GridMismatchError, InvalidInputError, NoSignChangeError
from .fracquad import trap_weights
from .scheme import MeshConfig, PhaseGrid, advance_phase, make_phase_grid, recover_physical

__all__ = [
    "FrontSolveResult",
    "bisection_solve",
    "final_time",
    "front_residual",
    "front_series",
    "stefan_front_value",
]

logger = logging.getLogger(__name__)

DEFAULT_BRACKET = (0.1, 2.0)
DEFAULT_EPS = 1e-3
DEFAULT_MAX_ITER = 60


@dataclass
class FrontSolveResult:
    """Outcome of the bisection search for the front coefficient."""

    p: float
    s_final: float
    residual: float
    iterations: int
    history: list = field(repr=False)  # (candidate p, S(tau_n)) pairs, in order
    converged: bool


def _interface_fluxes(g1: PhaseGrid, g2: PhaseGrid):
    """One-sided difference quotients of the recovered temperatures.

    Returns (flux1, flux2) per time level.  The level-0 liquid quotient is
    defined as zero: its numerator vanishes identically with empty initial
    liquid data, and the guard keeps 0 over a near-zero spacing from
    producing junk.
    """
    if g1.phase != 1 or g2.phase != 2:
        raise GridMismatchError(f"expected phases (1, 2), got ({g1.phase}, {g2.phase})")
    if g1.p != g2.p or g1.dtau != g2.dtau or g1.mesh.n != g2.mesh.n:
        raise GridMismatchError(
            f"grids disagree: p {g1.p} vs {g2.p}, dtau {g1.dtau} vs {g2.dtau}, "
            f"n {g1.mesh.n} vs {g2.mesh.n}"
        )
    n = g1.mesh.n
    if g1.filled_through < n or g2.filled_through < n:
        raise GridMismatchError(
            f"grids must be advanced through level {n}, got "
            f"{g1.filled_through} and {g2.filled_through}"
        )
    f1 = recover_physical(g1)
    f2 = recover_physical(g2)
    m1 = g1.m
    flux1 = np.empty(n + 1)
    flux1[0] = 0.0
    flux1[1:] = (f1.u[1:, m1] - f1.u[1:, m1 - 1]) / (f1.x[1:, m1] - f1.x[1:, m1 - 1])
    flux2 = (f2.u[:, 1] - f2.u[:, 0]) / (f2.x[:, 1] - f2.x[:, 0])
    return flux1, flux2


def stefan_front_value(g1: PhaseGrid, g2: PhaseGrid) -> float:
    """Discrete front position S(tau_n) from the interface heat balance.

    Both grids must be fully advanced with the same p and time step.
    """
    flux1, flux2 = _interface_fluxes(g1, g2)
    params = g1.params
    n = g1.mesh.n
    w = trap_weights(n - 1, params.alpha, g1.dtau).c  # weights targeting level n
    ga = math.gamma(params.alpha)
    return float(
        (params.lambda2 / ga) * np.dot(w, flux2)
        - (params.lambda1 / ga) * np.dot(w, flux1)
    )


def front_series(g1: PhaseGrid, g2: PhaseGrid) -> np.ndarray:
    """Front position from the heat balance at every level, S[0..n].

    S[0] is pinned to 0 (the front starts at the origin); S[n] equals
    stefan_front_value.
    """
    flux1, flux2 = _interface_fluxes(g1, g2)
    params = g1.params
    a = params.alpha
    ga = math.gamma(a)
    n = g1.mesh.n
    series = np.zeros(n + 1)
    for k in range(1, n + 1):
        w = trap_weights(k - 1, a, g1.dtau).c
        series[k] = (params.lambda2 / ga) * np.dot(w, flux2[:k + 1]) \
            - (params.lambda1 / ga) * np.dot(w, flux1[:k + 1])
    return series


def front_residual(p: float, params: PhysicalParams, mesh: MeshConfig) -> float:
    """1 - S(tau_n, p): build both grids for candidate p, advance, evaluate.

    Nothing is cached across candidates; each call is an independent solve.
    """
    if not p > 0.0:
        raise InvalidInputError(f"front coefficient must be > 0, got {p}")
    try:
        g1 = advance_phase(make_phase_grid(1, p, mesh, params))
        g2 = advance_phase(make_phase_grid(2, p, mesh, params))
        return 1.0 - stefan_front_value(g1, g2)
    except FracStefanError as exc:
        raise type(exc)(f"candidate p={p:.8g}: {exc}") from exc


def bisection_solve(params: PhysicalParams, mesh: MeshConfig,
                    bracket=DEFAULT_BRACKET, eps: float = DEFAULT_EPS,
                    max_iter: int = DEFAULT_MAX_ITER,
                    residual_fn=None) -> FrontSolveResult:
    """Bisection on the front residual.

    Follows the classic recipe: evaluate both endpoints first (either may
    already satisfy |1 - S| < eps and end the search), require a sign
    change, then halve.  Hitting max_iter returns converged=False rather
    than raising.  residual_fn replaces the grid solve, for testing.
    """
    p_a, p_b = float(bracket[0]), float(bracket[1])
    if not (0.0 < p_a < p_b):
        raise InvalidInputError(f"bracket must satisfy 0 < p_a < p_b, got {bracket}")
    if not eps > 0.0:
        raise InvalidInputError(f"eps must be > 0, got {eps}")
    if max_iter < 1:
        raise InvalidInputError(f"max_iter must be >= 1, got {max_iter}")
    if residual_fn is None:
        residual_fn = lambda p: front_residual(p, params, mesh)

    history = []

    def evaluate(p):
        r = residual_fn(p)
        history.append((p, 1.0 - r))
        logger.debug("front residual at p=%.8g: %+.6e", p, r)
        return r

    r_a = evaluate(p_a)
    if abs(r_a) < eps:
        return FrontSolveResult(p_a, 1.0 - r_a, r_a, 0, history, True)
    r_b = evaluate(p_b)
    if abs(r_b) < eps:
        return FrontSolveResult(p_b, 1.0 - r_b, r_b, 0, history, True)
    if r_a * r_b >= 0.0:
        raise NoSignChangeError(
            f"front residual does not change sign on [{p_a}, {p_b}]: "
            f"{r_a:+.6e} vs {r_b:+.6e}"
        )

    p_c, r_c = p_a, r_a
    for iteration in range(1, max_iter + 1):
        p_c = 0.5 * (p_a + p_b)
        r_c = evaluate(p_c)
        if abs(r_c) < eps:
            return FrontSolveResult(p_c, 1.0 - r_c, r_c, iteration, history, True)
        if r_a * r_c > 0.0:
            p_a, r_a = p_c, r_c
        else:
            p_b, r_b = p_c, r_c
    return FrontSolveResult(p_c, 1.0 - r_c, r_c, max_iter, history, False)


def final_time(p: float, alpha: float) -> float:
    """Time at which the prescribed front reaches x = 1: p**(-2/alpha)."""
    if not p > 0.0:
        raise InvalidInputError(f"front coefficient must be > 0, got {p}")
    if not 0.0 < alpha <= 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1], got {alpha}")
    return p ** (-2.0 / alpha)
