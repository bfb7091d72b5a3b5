"""Fixed-step time integration of the coupled dynamics.

Forward Euler is the default method; classical RK4 is provided as an
internal reference integrator for validating Euler results.  Both share the
same vector field and the same post-step clamping rule: with clamping on
(default) every component is projected onto the nonnegative orthant after
the full update, and each projection is counted as a clamp event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ControlParams, State, SystemParams, vector_field

EULER = "euler"
RK4 = "rk4"

DEFAULT_MAX_STEPS = 10_000_000


class DivergenceError(ArithmeticError):
    """Integration produced a non-finite state.

    Reports the last finite state and the time/step at which it was reached.
    """

    def __init__(self, last_state: State, last_time: float, step: int):
        self.last_state = last_state
        self.last_time = last_time
        self.step = step
        super().__init__(
            f"non-finite state at step {step}; last finite state "
            f"(H={last_state.H!r}, Q={last_state.Q!r}, M={last_state.M!r}) "
            f"at t={last_time!r}"
        )


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = EULER
    h: float = 0.01
    T: float = 100.0
    clamp_nonneg: bool = True
    max_steps: int = DEFAULT_MAX_STEPS
    stride: int = 1
    """Decimation stride for recording; every stride-th step is kept (the
    final time is always recorded)."""


def config_violations(config: IntegratorConfig) -> list[str]:
    violations = []
    if config.method not in (EULER, RK4):
        violations.append(f"method must be '{EULER}' or '{RK4}', got {config.method!r}")
    if not (math.isfinite(config.h) and config.h > 0):
        violations.append(f"h must be > 0, got {config.h!r}")
    if not (math.isfinite(config.T) and config.T > 0):
        violations.append(f"T must be > 0, got {config.T!r}")
    if config.h > 0 and config.T > 0 and config.T / config.h > config.max_steps:
        violations.append(
            f"T/h = {config.T / config.h:.3g} exceeds max step count {config.max_steps}"
        )
    if config.stride < 1:
        violations.append(f"stride must be >= 1, got {config.stride!r}")
    return violations


@dataclass
class Trajectory:
    """Recorded integration output.

    times are strictly increasing with constant spacing stride*h; the last
    interval may be shorter so the final sample lands exactly on T.  A and S
    are the control signals evaluated at the recorded states.
    """

    times: np.ndarray
    states: np.ndarray  # shape (n, 3), columns H, Q, M
    A: np.ndarray
    S: np.ndarray
    clamp_events: int = 0

    def __len__(self) -> int:
        return len(self.times)

    def final_state(self) -> State:
        return State.from_array(self.states[-1])

    def decimate(self, factor: int) -> "Trajectory":
        """Keep every factor-th sample (always including the first)."""
        return Trajectory(
            times=self.times[::factor],
            states=self.states[::factor],
            A=self.A[::factor],
            S=self.S[::factor],
            clamp_events=self.clamp_events,
        )


def _euler(H, Q, M, params, control, h, clamp):
    dH, dQ, dM = vector_field(H, Q, M, params, control)
    H, Q, M = H + h * dH, Q + h * dQ, M + h * dM
    clamps = 0
    if clamp:
        if H < 0.0:
            H, clamps = 0.0, clamps + 1
        if Q < 0.0:
            Q, clamps = 0.0, clamps + 1
        if M < 0.0:
            M, clamps = 0.0, clamps + 1
    return H, Q, M, clamps


def _rk4(H, Q, M, params, control, h, clamp):
    k1H, k1Q, k1M = vector_field(H, Q, M, params, control)
    half = 0.5 * h
    k2H, k2Q, k2M = vector_field(H + half * k1H, Q + half * k1Q, M + half * k1M, params, control)
    k3H, k3Q, k3M = vector_field(H + half * k2H, Q + half * k2Q, M + half * k2M, params, control)
    k4H, k4Q, k4M = vector_field(H + h * k3H, Q + h * k3Q, M + h * k3M, params, control)
    sixth = h / 6.0
    H = H + sixth * (k1H + 2.0 * k2H + 2.0 * k3H + k4H)
    Q = Q + sixth * (k1Q + 2.0 * k2Q + 2.0 * k3Q + k4Q)
    M = M + sixth * (k1M + 2.0 * k2M + 2.0 * k3M + k4M)
    clamps = 0
    if clamp:
        if H < 0.0:
            H, clamps = 0.0, clamps + 1
        if Q < 0.0:
            Q, clamps = 0.0, clamps + 1
        if M < 0.0:
            M, clamps = 0.0, clamps + 1
    return H, Q, M, clamps


_STEPPERS = {EULER: _euler, RK4: _rk4}


def euler_step(
    state: State, params: SystemParams, control: ControlParams, h: float, clamp: bool = True
) -> State:
    """One forward-Euler update x + h*f(x), clamped per component if enabled."""
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h!r}")
    H, Q, M, _ = _euler(state.H, state.Q, state.M, params, control, h, clamp)
    _check_finite(H, Q, M, state, 0.0, 0)
    return State(H, Q, M)


def rk4_step(
    state: State, params: SystemParams, control: ControlParams, h: float, clamp: bool = True
) -> State:
    """One classical 4-stage Runge-Kutta update; clamping applied once after
    the combined update."""
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h!r}")
    H, Q, M, _ = _rk4(state.H, state.Q, state.M, params, control, h, clamp)
    _check_finite(H, Q, M, state, 0.0, 0)
    return State(H, Q, M)


def _check_finite(H, Q, M, last_state, last_time, step):
    if not (math.isfinite(H) and math.isfinite(Q) and math.isfinite(M)):
        raise DivergenceError(last_state, last_time, step)


def _step_grid(h: float, T: float) -> tuple[int, float]:
    """Number of full h-steps and the remainder step landing exactly on T."""
    ratio = T / h
    n_full = int(math.floor(ratio))
    # absorb floating-point shortfall when T/h is an integer up to rounding
    if ratio - n_full > 1.0 - 1e-9 * max(1.0, ratio):
        n_full += 1
    rem = T - n_full * h
    if rem <= h * 1e-12:
        rem = 0.0
    return n_full, rem


def integrate(
    init: State, params: SystemParams, control: ControlParams, config: IntegratorConfig
) -> Trajectory:
    """Integrate from t=0 to t=T inclusive, recording states and control
    signals.  Deterministic: identical inputs give bit-identical output."""
    violations = config_violations(config)
    if violations:
        from .dynamics import ValidationError

        raise ValidationError(violations)

    stepper = _STEPPERS[config.method]
    h, stride, clamp = config.h, config.stride, config.clamp_nonneg
    n_full, rem = _step_grid(h, config.T)

    H, Q, M = init.H, init.Q, init.M
    times = [0.0]
    rows = [(H, Q, M)]
    clamp_events = 0

    for k in range(1, n_full + 1):
        Hn, Qn, Mn, clamps = stepper(H, Q, M, params, control, h, clamp)
        _check_finite(Hn, Qn, Mn, State(H, Q, M), (k - 1) * h, k)
        H, Q, M = Hn, Qn, Mn
        clamp_events += clamps
        if k % stride == 0 and not (k == n_full and rem == 0.0):
            times.append(k * h)
            rows.append((H, Q, M))

    if rem > 0.0:
        Hn, Qn, Mn, clamps = stepper(H, Q, M, params, control, rem, clamp)
        _check_finite(Hn, Qn, Mn, State(H, Q, M), n_full * h, n_full + 1)
        H, Q, M = Hn, Qn, Mn
        clamp_events += clamps

    # the final time is always recorded, exactly at T
    times.append(config.T)
    rows.append((H, Q, M))

    times_arr = np.array(times, dtype=float)
    states = np.array(rows, dtype=float)
    A = control.alpha * control.u * states[:, 2]
    S = control.beta * A
    return Trajectory(times=times_arr, states=states, A=A, S=S, clamp_events=clamp_events)
