"""Series-wound DC motor model and the time-delay-control voltage law.

Field and armature currents are equal (series winding), so the back EMF is
``K i theta_dot`` and the developed torque is ``K i^2``. Torque is treated
as signed: the current direction follows the sign of the pitch angle, and
:func:`motor_torque` returns ``K i |i|`` so that it inverts
:func:`required_current`.
"""

import math
from dataclasses import dataclass, field, replace

from twptr.errors import ValidationError
from twptr.ode import rk4_step

CURRENT_ZERO = 1e-12
TORQUE_GUARD = 1e-9


def _sign(value):
    return float((value > 0) - (value < 0))


@dataclass(frozen=True)
class MotorParams:
    K: float = 1.0  # composite motor constant K1*K2 [N m / A^2]
    R: float = 1.0  # [ohm]
    L: float = 0.5  # [H]
    b_m: float = 0.01  # [N m s / rad]
    I_w: float = 0.07  # rotor + wheel inertia [kg m^2]
    delay_samples: int = 2

    def __post_init__(self):
        for name, value, lower, strict in (
            ("K", self.K, 0.0, True),
            ("R", self.R, 0.0, False),
            ("L", self.L, 0.0, True),
            ("b_m", self.b_m, 0.0, False),
            ("I_w", self.I_w, 0.0, True),
        ):
            if not math.isfinite(value) or value < lower or (strict and value == lower):
                raise ValidationError(name, f"must be {'>' if strict else '>='} 0, got {value!r}")
        if int(self.delay_samples) != self.delay_samples or self.delay_samples < 0:
            raise ValidationError("delay_samples", f"must be a non-negative integer, got {self.delay_samples!r}")


@dataclass(frozen=True)
class MotorState:
    i: float = 0.0
    theta_dot: float = 0.0
    theta: float = 0.0
    tau_prev: float = 0.0


@dataclass(frozen=True)
class DelayLine:
    """FIFO of commands; ``buffer[0]`` is the oldest entry."""

    depth: int
    buffer: tuple = field(default=None)

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValidationError("depth", f"must be a non-negative integer, got {self.depth!r}")
        if self.buffer is None:
            object.__setattr__(self, "buffer", (0.0,) * self.depth)
        elif len(self.buffer) != self.depth:
            raise ValueError(f"buffer length {len(self.buffer)} != depth {self.depth}")


def delay_push(line, cmd):
    """Push ``cmd`` and return ``(command pushed depth samples ago, new line)``."""
    if line.depth == 0:
        return cmd, line
    out = line.buffer[0]
    return out, replace(line, buffer=line.buffer[1:] + (cmd,))


def back_emf(motor, i, theta_dot):
    return motor.K * i * theta_dot


def required_current(motor, tau, phi_sign):
    """Current that develops ``|tau|``, with direction taken from ``phi_sign``."""
    if abs(tau) < CURRENT_ZERO:
        return 0.0
    return _sign(phi_sign) * math.sqrt(abs(tau) / motor.K)


def motor_torque(motor, i):
    return motor.K * i * abs(i)


def tdc_voltage(motor, tau, tau_prev, Ts, theta_dot, phi_sign):
    """Armature voltage that produces the torque command ``tau``.

    The torque rate is the backward difference over one sample, which is
    where the previous sample's information enters. ``|tau|`` is floored at
    1e-9 so the law stays finite at zero torque.
    """
    tau_dot = (tau - tau_prev) / Ts
    tau_pos = max(abs(tau), TORQUE_GUARD)
    K, L, R = motor.K, motor.L, motor.R
    v = L * tau_dot / (2.0 * math.sqrt(K * tau_pos)) + (R + K * theta_dot) * math.sqrt(tau_pos / K)
    return _sign(phi_sign) * v


def motor_derivative(motor, V):
    K, R, L, b_m, I_w = motor.K, motor.R, motor.L, motor.b_m, motor.I_w

    def f(t, y):
        i, theta_dot, _theta = y
        di = (V - R * i - K * i * theta_dot) / L
        dw = (K * i * abs(i) - b_m * theta_dot) / I_w
        return di, dw, theta_dot

    return f


def motor_step(motor, state, V, h):
    """One RK4 step of the electrical and shaft equations under constant ``V``."""
    i, theta_dot, theta = rk4_step(motor_derivative(motor, V), 0.0, (state.i, state.theta_dot, state.theta), h)
    return replace(state, i=i, theta_dot=theta_dot, theta=theta)
