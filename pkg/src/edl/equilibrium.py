"""Fixed points, Jacobian eigenstructure, and regime classification.

The linear control closure gives a unique fixed point in closed form:

    H* = (a*(1-u) + r_H) / (b*u)
    M* = (c*H* + r_Q) / (d*alpha*u)        (from dQ/dt = 0)
    Q* = (f*beta*alpha*u*M* - r_M) / e     (from dM/dt = 0)

The vector field is linear, so the Jacobian is state-independent:

    J = [[-b*u,  0,       0        ],
         [ c,    0,      -d*alpha*u],
         [ 0,    e,      -f*beta*alpha*u]]

Its spectrum factors into the decoupled H-rate -b*u plus the roots of
lambda^2 + (f*beta*alpha*u)*lambda + (e*d*alpha*u) = 0, which are computed
by a numerically stable quadratic formula rather than a general eigensolver
so results are deterministic.

Regimes are trajectory properties, labeled from tail-window statistics:
Enhancement (sustained growth over the horizon), Equilibrium (converged to
a bounded fixed point), Degeneration (converged with H and Q well below
their initial values), or Unclassified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ControlParams, State, SystemParams, derivative
from .integrators import Trajectory

STABLE_NODE = "StableNode"
STABLE_SPIRAL_MIXED = "StableSpiralMixed"
UNSTABLE = "Unstable"
MARGINAL = "Marginal"

ENHANCEMENT = "Enhancement"
EQUILIBRIUM = "Equilibrium"
DEGENERATION = "Degeneration"
UNCLASSIFIED = "Unclassified"

EIG_EPS = 1e-10
RESIDUAL_TOL = 1e-9


class SingularEquilibriumError(ZeroDivisionError):
    """u = 0 leaves the H-equation without a finite fixed point."""


def fixed_point(params: SystemParams, control: ControlParams) -> np.ndarray:
    """Closed-form fixed point (H*, Q*, M*) of the linear closure.

    Raises SingularEquilibriumError when u = 0 (b*u and d*alpha*u vanish).
    The returned point is asserted to zero the vector field to within
    1e-9*(1+||x*||); Q* may be negative when r_M dominates, in which case
    the unclamped linear field still vanishes there.
    """
    u = control.u
    if u == 0.0:
        raise SingularEquilibriumError(
            "u = 0: H-equation has no finite fixed point (division by b*u)"
        )
    H_star = (params.a * (1.0 - u) + params.r_H) / (params.b * u)
    M_star = (params.c * H_star + params.r_Q) / (params.d * control.alpha * u)
    Q_star = (params.f * control.beta * control.alpha * u * M_star - params.r_M) / params.e
    x = np.array([H_star, Q_star, M_star], dtype=float)
    res = residual(x, params, control)
    if not res < RESIDUAL_TOL * (1.0 + float(np.linalg.norm(x))):
        raise ArithmeticError(
            f"fixed point failed residual check: ||f(x*)|| = {res!r} at x* = {x!r}"
        )
    return x


def residual(x: np.ndarray, params: SystemParams, control: ControlParams) -> float:
    """||f(x)||: how far x is from zeroing the vector field."""
    return float(np.linalg.norm(derivative(State.from_array(x), params, control)))


def jacobian(params: SystemParams, control: ControlParams) -> np.ndarray:
    """Exact constant Jacobian of the linear vector field."""
    u = control.u
    dau = params.d * control.alpha * u
    fbau = params.f * control.beta * control.alpha * u
    return np.array(
        [
            [-params.b * u, 0.0, 0.0],
            [params.c, 0.0, -dau],
            [0.0, params.e, -fbau],
        ]
    )


def eigenvalues(J: np.ndarray) -> np.ndarray:
    """Eigenvalues of the block-structured Jacobian, sorted by real part.

    Requires the first row to be zero off the diagonal, which decouples
    J[0,0] from the lower 2x2 block; the block's pair comes from its
    characteristic quadratic via a cancellation-safe formula.
    """
    J = np.asarray(J, dtype=float)
    if J.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {J.shape}")
    if J[0, 1] != 0.0 or J[0, 2] != 0.0:
        raise ValueError("first row must be zero off the diagonal")
    lam0 = complex(J[0, 0])
    tr = J[1, 1] + J[2, 2]
    det = J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        sq = math.sqrt(disc)
        if tr >= 0.0:
            r1 = 0.5 * (tr + sq)
        else:
            r1 = 0.5 * (tr - sq)
        r2 = det / r1 if r1 != 0.0 else 0.5 * (tr + sq)
        pair = [complex(r1), complex(r2)]
    else:
        im = 0.5 * math.sqrt(-disc)
        pair = [complex(0.5 * tr, -im), complex(0.5 * tr, im)]
    eigs = np.array(sorted([lam0, *pair], key=lambda z: (z.real, z.imag)), dtype=complex)
    return eigs


def classify_stability(eigs: np.ndarray, eps: float = EIG_EPS) -> str:
    """Map a 3-eigenvalue spectrum to a stability class."""
    eigs = np.asarray(eigs, dtype=complex)
    re = eigs.real
    if np.max(re) > eps:
        return UNSTABLE
    if np.max(re) >= -eps:
        return MARGINAL
    if np.any(eigs.imag != 0.0):
        return STABLE_SPIRAL_MIXED
    return STABLE_NODE


@dataclass(frozen=True)
class EquilibriumReport:
    fixed_point: np.ndarray
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    stability: str
    residual: float


def analyze(params: SystemParams, control: ControlParams) -> EquilibriumReport:
    """Fixed point + spectrum + stability class in one report."""
    x = fixed_point(params, control)
    J = jacobian(params, control)
    eigs = eigenvalues(J)
    return EquilibriumReport(
        fixed_point=x,
        jacobian=J,
        eigenvalues=eigs,
        stability=classify_stability(eigs),
        residual=residual(x, params, control),
    )


@dataclass(frozen=True)
class RegimeThresholds:
    """Classifier thresholds; not part of the underlying model, so they are
    exposed here (and in scenario files) for sensitivity reporting."""

    eps_eq: float = 1e-4
    s_conv: float = 1e-4
    s_min: float = 1e-3
    delta: float = 0.1
    """Required fractional decline of H and Q for the Degeneration label."""


@dataclass(frozen=True)
class RegimeLabel:
    """Classification outcome plus the evidence sufficient to re-derive it."""

    label: str
    converged: bool
    residual: float
    mean_rel_slopes: np.ndarray  # signed, per component, over the tail window
    mean_abs_rel_slopes: np.ndarray
    endpoint_ratios: np.ndarray  # x(T) / max(x(0), tiny) per component
    thresholds: RegimeThresholds


def classify_regime(
    traj: Trajectory,
    params: SystemParams,
    control: ControlParams,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> RegimeLabel:
    """Label a trajectory from its tail window (last 10% of samples).

    Rules, in order: (1) converged when the normalized field residual at the
    endpoint and all mean absolute relative tail slopes are below threshold;
    (2) converged with H and Q both down by more than delta -> Degeneration;
    (3) converged otherwise -> Equilibrium; (4) not converged with all three
    tail slopes positive and relatively large -> Enhancement;
    (5) otherwise Unclassified.
    """
    n = len(traj)
    if n < 20:
        raise ValueError(f"trajectory too short to classify: {n} samples < 20")

    window = max(2, math.ceil(0.1 * n))
    t = traj.times[-window:]
    x = traj.states[-window:]

    dt = np.diff(t)[:, None]
    slopes = np.diff(x, axis=0) / dt
    rel = slopes / (1.0 + x[:-1])
    mean_rel = rel.mean(axis=0)
    mean_abs_rel = np.abs(rel).mean(axis=0)

    x_T = traj.states[-1]
    res = residual(x_T, params, control) / (1.0 + float(np.linalg.norm(x_T)))
    converged = res < thresholds.eps_eq and bool(np.all(mean_abs_rel < thresholds.s_conv))

    x_0 = traj.states[0]
    ratios = x_T / np.maximum(x_0, np.finfo(float).tiny)

    if converged:
        declined = (x_T[0] < (1.0 - thresholds.delta) * x_0[0]) and (
            x_T[1] < (1.0 - thresholds.delta) * x_0[1]
        )
        label = DEGENERATION if declined else EQUILIBRIUM
    elif bool(np.all(mean_rel > thresholds.s_min)):
        label = ENHANCEMENT
    else:
        label = UNCLASSIFIED

    return RegimeLabel(
        label=label,
        converged=converged,
        residual=res,
        mean_rel_slopes=mean_rel,
        mean_abs_rel_slopes=mean_abs_rel,
        endpoint_ratios=ratios,
        thresholds=thresholds,
    )
