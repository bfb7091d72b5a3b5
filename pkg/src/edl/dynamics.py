"""Core coupled dynamics of human cognition, data quality, and model capability.

State x = (H, Q, M) lives in the nonnegative orthant and evolves under

    dH/dt = a*(1-u) - b*u*H + r_H
    dQ/dt = c*H    - d*A   + r_Q
    dM/dt = e*Q    - f*S   + r_M

closed by the linear control relations A = alpha*u*M (AI-generated content
volume) and S = beta*A (synthetic noise).  u in [0,1] is the degree of
cognitive offloading.  a, c, e are reinforcement rates, b, d, f degradation
rates, and r_H, r_Q, r_M exogenous intervention inputs (education, curation,
model innovation).

All values here are immutable after construction and every operation is a
pure function, so they are safe to share between concurrent evaluations.
The rate vector is returned unclamped even at the H=0 boundary;
non-negativity enforcement belongs to the integrator, not the vector field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    """Raised when parameters or state violate their declared constraints.

    Carries the full list of violations, not just the first one found.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class State:
    """System state (H, Q, M): human cognitive capacity, collective data
    quality, model capability.  Dimensionless, finite, >= 0."""

    H: float
    Q: float
    M: float

    def as_array(self) -> np.ndarray:
        return np.array([self.H, self.Q, self.M], dtype=float)

    @staticmethod
    def from_array(x) -> "State":
        H, Q, M = (float(v) for v in x)
        return State(H, Q, M)


@dataclass(frozen=True)
class SystemParams:
    """Rate constants of the coupled system.

    a, c, e: reinforcement (cognitive growth, human-driven quality, model
    scaling), strictly positive.  b, d, f: degradation (offloading decay,
    content drift, synthetic noise), strictly positive.  r_H, r_Q, r_M:
    exogenous inputs, nonnegative (interventions only add).
    """

    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    d: float = 1.0
    e: float = 1.0
    f: float = 1.0
    r_H: float = 0.0
    r_Q: float = 0.0
    r_M: float = 0.0


@dataclass(frozen=True)
class ControlParams:
    """Control closure constants: A = alpha*u*M, S = beta*A."""

    alpha: float = 1.0
    beta: float = 1.0
    u: float = 0.5


@dataclass(frozen=True)
class ControlSignals:
    """Derived control signals: AI-generated content volume A and synthetic
    noise level S, with S = beta*A exactly."""

    A: float
    S: float


def validate(params: SystemParams, control: ControlParams) -> list[str]:
    """Check every type invariant; return the full list of violations.

    An empty list means the inputs are valid.
    """
    violations: list[str] = []
    for name in ("a", "b", "c", "d", "e", "f"):
        v = getattr(params, name)
        if not math.isfinite(v):
            violations.append(f"{name} must be finite, got {v!r}")
        elif v <= 0:
            violations.append(f"{name} must be > 0, got {v!r}")
    for name in ("r_H", "r_Q", "r_M"):
        v = getattr(params, name)
        if not math.isfinite(v):
            violations.append(f"{name} must be finite, got {v!r}")
        elif v < 0:
            violations.append(f"{name} must be >= 0, got {v!r}")
    for name in ("alpha", "beta"):
        v = getattr(control, name)
        if not math.isfinite(v):
            violations.append(f"{name} must be finite, got {v!r}")
        elif v <= 0:
            violations.append(f"{name} must be > 0, got {v!r}")
    if not math.isfinite(control.u):
        violations.append(f"u must be finite, got {control.u!r}")
    elif not 0.0 <= control.u <= 1.0:
        violations.append(f"u must lie in [0,1], got {control.u!r}")
    return violations


def require_valid(params: SystemParams, control: ControlParams) -> None:
    """Raise ValidationError (listing every violation) on invalid inputs."""
    violations = validate(params, control)
    if violations:
        raise ValidationError(violations)


def state_violations(state: State) -> list[str]:
    """Invariant check for a state: all components finite and >= 0."""
    violations = []
    for name in ("H", "Q", "M"):
        v = getattr(state, name)
        if not math.isfinite(v):
            violations.append(f"state {name} must be finite, got {v!r}")
        elif v < 0:
            violations.append(f"state {name} must be >= 0, got {v!r}")
    return violations


def control_signals(state: State, control: ControlParams) -> ControlSignals:
    """Close the loop: (A, S) = (alpha*u*M, beta*alpha*u*M)."""
    A = control.alpha * control.u * state.M
    return ControlSignals(A=A, S=control.beta * A)


def vector_field(
    H: float, Q: float, M: float, params: SystemParams, control: ControlParams
) -> tuple[float, float, float]:
    """Scalar core of the vector field; returns (dH/dt, dQ/dt, dM/dt).

    This is the single source of truth for the dynamics; the integrators
    call it directly to avoid per-step array overhead.
    """
    A = control.alpha * control.u * M
    S = control.beta * A
    dH = params.a * (1.0 - control.u) - params.b * control.u * H + params.r_H
    dQ = params.c * H - params.d * A + params.r_Q
    dM = params.e * Q - params.f * S + params.r_M
    return dH, dQ, dM


def derivative(state: State, params: SystemParams, control: ControlParams) -> np.ndarray:
    """Rate vector (dH, dQ, dM) at `state`.  Pure; unclamped at boundaries.

    Raises ValidationError naming the offending component if any rate is
    non-finite (overflow in the inputs).
    """
    dH, dQ, dM = vector_field(state.H, state.Q, state.M, params, control)
    bad = [n for n, v in (("dH", dH), ("dQ", dQ), ("dM", dM)) if not math.isfinite(v)]
    if bad:
        raise ValidationError([f"non-finite rate component {n}" for n in bad])
    return np.array([dH, dQ, dM], dtype=float)
