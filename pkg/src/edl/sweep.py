"""Parameter sweeps over the offloading degree u, detection of the critical
threshold u_c, and steady-state intervention comparisons.

Steady states along a sweep default to the exact closed form (Analytic
mode); Simulated mode integrates each grid point to a horizon and averages
the tail window, which also yields regime labels since regimes are
trajectory properties.  u = 0 is excluded from every grid: the equilibrium
is singular there.

The critical threshold is operationalized as the grid point with maximal
absolute second central difference of Q*(u); the transition band is the
maximal contiguous run of grid points whose curvature magnitude is at least
half the maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import ControlParams, State, SystemParams, ValidationError, require_valid
from .equilibrium import classify_regime, classify_stability, eigenvalues, fixed_point, jacobian
from .integrators import IntegratorConfig, integrate

ANALYTIC = "analytic"
SIMULATED = "simulated"


@dataclass(frozen=True)
class SimulationSpec:
    """How Simulated mode integrates each grid point."""

    init: State = State(1.0, 1.0, 1.0)
    h: float = 0.01
    T: float = 500.0


@dataclass
class SweepResult:
    u: np.ndarray
    steady_states: np.ndarray  # shape (n, 3), columns H*, Q*, M*
    max_re: np.ndarray  # max real part of the spectrum per grid point
    stability: list[str]
    regimes: Optional[list[str]]  # populated in simulated mode only
    mode: str


@dataclass(frozen=True)
class ThresholdResult:
    """Detected critical threshold, or an explicit no-threshold outcome.

    u_c is None exactly when Q* has zero curvature everywhere on the grid.
    curvature holds |second central difference| at the interior grid points
    u_interior.
    """

    u_c: Optional[float]
    band: Optional[tuple[float, float]]
    u_interior: np.ndarray
    curvature: np.ndarray

    @property
    def detected(self) -> bool:
        return self.u_c is not None


def _check_grid(u_grid: np.ndarray) -> None:
    violations = []
    if len(u_grid) < 8:
        violations.append(f"u grid needs >= 8 points, got {len(u_grid)}")
    if np.any(u_grid <= 0.0):
        violations.append("u grid must be strictly positive (u = 0 is singular)")
    if np.any(np.diff(u_grid) <= 0.0):
        violations.append("u grid must be strictly increasing")
    if not np.all(np.isfinite(u_grid)):
        violations.append("u grid must be finite")
    if violations:
        raise ValidationError(violations)


def sweep_u(
    params: SystemParams,
    alpha: float,
    beta: float,
    u_grid,
    mode: str = ANALYTIC,
    sim: SimulationSpec = SimulationSpec(),
) -> SweepResult:
    """Steady states, eigenvalue summaries and (simulated only) regime
    labels across a u grid.  Deterministic in both modes."""
    u_grid = np.asarray(u_grid, dtype=float)
    _check_grid(u_grid)
    if mode not in (ANALYTIC, SIMULATED):
        raise ValidationError([f"mode must be '{ANALYTIC}' or '{SIMULATED}', got {mode!r}"])

    steady = np.empty((len(u_grid), 3))
    max_re = np.empty(len(u_grid))
    stability: list[str] = []
    regimes: Optional[list[str]] = [] if mode == SIMULATED else None

    for i, u in enumerate(u_grid):
        control = ControlParams(alpha=alpha, beta=beta, u=float(u))
        require_valid(params, control)
        eigs = eigenvalues(jacobian(params, control))
        max_re[i] = eigs.real.max()
        stability.append(classify_stability(eigs))
        if mode == ANALYTIC:
            steady[i] = fixed_point(params, control)
        else:
            config = IntegratorConfig(method="rk4", h=sim.h, T=sim.T)
            traj = integrate(sim.init, params, control, config)
            window = max(2, int(np.ceil(0.1 * len(traj))))
            steady[i] = traj.states[-window:].mean(axis=0)
            regimes.append(classify_regime(traj, params, control).label)

    return SweepResult(
        u=u_grid, steady_states=steady, max_re=max_re, stability=stability,
        regimes=regimes, mode=mode,
    )


def second_central_differences(u: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Three-point second differences at interior points; exact second
    derivative scale on uniform grids, spacing-aware otherwise."""
    h1 = u[1:-1] - u[:-2]
    h2 = u[2:] - u[1:-1]
    return 2.0 * (
        q[:-2] / (h1 * (h1 + h2)) - q[1:-1] / (h1 * h2) + q[2:] / (h2 * (h1 + h2))
    )


def detect_threshold(sweep: SweepResult) -> ThresholdResult:
    """Locate u_c as the interior grid point maximizing |d2 Q*/du2|.

    Ties break toward smaller u.  The transition band is the longest
    contiguous run of interior points with curvature >= half the maximum
    (leftmost run on ties).  All-zero curvature yields an explicit
    no-threshold result.
    """
    u = sweep.u
    q = sweep.steady_states[:, 1]
    if len(u) < 8:
        raise ValidationError([f"threshold detection needs >= 8 grid points, got {len(u)}"])
    if not np.all(np.isfinite(q)):
        raise ValidationError(["threshold detection requires finite Q* values"])

    curvature = np.abs(second_central_differences(u, q))
    u_interior = u[1:-1]
    cmax = curvature.max()
    if cmax == 0.0:
        return ThresholdResult(u_c=None, band=None, u_interior=u_interior, curvature=curvature)

    idx = int(np.argmax(curvature))  # argmax returns the first (smallest-u) maximizer
    mask = curvature >= 0.5 * cmax

    best_start, best_len = 0, 0
    start = None
    for i, flag in enumerate([*mask, False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best_len:
                best_start, best_len = start, i - start
            start = None
    band = (float(u_interior[best_start]), float(u_interior[best_start + best_len - 1]))

    return ThresholdResult(
        u_c=float(u_interior[idx]), band=band, u_interior=u_interior, curvature=curvature
    )


@dataclass(frozen=True)
class InterventionEffect:
    channel: str
    increment: float
    steady_state: np.ndarray
    delta: np.ndarray
    signs: tuple[int, int, int]


@dataclass(frozen=True)
class InterventionReport:
    baseline: np.ndarray
    effects: tuple[InterventionEffect, ...]


def compare_interventions(
    params: SystemParams,
    control: ControlParams,
    dr_H: float = 0.0,
    dr_Q: float = 0.0,
    dr_M: float = 0.0,
) -> InterventionReport:
    """Steady-state response to raising each exogenous input on its own.

    Deltas are exact differences of closed-form fixed points (no simulation
    noise); signs report the direction of each component's change.
    """
    increments = {"r_H": dr_H, "r_Q": dr_Q, "r_M": dr_M}
    bad = [f"{k} increment must be >= 0, got {v!r}" for k, v in increments.items() if v < 0]
    if bad:
        raise ValidationError(bad)
    require_valid(params, control)

    baseline = fixed_point(params, control)
    effects = []
    for channel, inc in increments.items():
        bumped = SystemParams(
            **{
                name: getattr(params, name) + (inc if name == channel else 0.0)
                for name in ("a", "b", "c", "d", "e", "f", "r_H", "r_Q", "r_M")
            }
        )
        x = fixed_point(bumped, control)
        delta = x - baseline
        signs = tuple(int(np.sign(d)) if d != 0.0 else 0 for d in delta)
        effects.append(
            InterventionEffect(
                channel=channel, increment=float(inc), steady_state=x, delta=delta, signs=signs
            )
        )
    return InterventionReport(baseline=baseline, effects=tuple(effects))
