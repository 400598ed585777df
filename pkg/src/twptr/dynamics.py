"""Rigid-body equations of the two-wheeled personal transporter.

Everything here is a pure function of its arguments. Angles are radians.
The pitch angle ``phi`` is the pendulum (body + rider) tilt about the wheel
axle, ``x`` the chassis translation along the direction of travel and
``wheel_angle`` the wheel rotation, tied to ``x`` by rolling without slip.

Two plant right-hand sides are offered through :class:`PlantModel`:

``AS_PRINTED``
    The published pendulum equation, with its negative composite inertia
    ``I_p - M l^2`` and no gravity term, closed with the published chassis
    acceleration evaluated at the previous step's pitch acceleration.
``CORRECTED``
    Composite inertia ``I_p + M l^2`` plus the gravity moment
    ``M g l sin(phi)``, with the chassis-acceleration coupling solved
    simultaneously.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from twptr.errors import DegenerateElimination, SingularDenominator, ValidationError

DENOMINATOR_GUARD = 1e-9
SLOPE_GUARD = 1e-12


def _check_positive(obj, names, allow_zero=()):
    for name in names:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise ValidationError(name, f"must be finite, got {value!r}")
        if name in allow_zero:
            if value < 0:
                raise ValidationError(name, f"must be >= 0, got {value!r}")
        elif value <= 0:
            raise ValidationError(name, f"must be > 0, got {value!r}")


@dataclass(frozen=True)
class RobotParams:
    """Physical constants. Defaults reproduce the published parameter table."""

    r: float = 0.2  # wheel radius [m]
    l: float = 1.0  # axle to centre of gravity [m]
    m: float = 4.0  # mass of each wheel [kg]
    M: float = 100.0  # body + rider mass [kg]
    I_w: float = 0.07  # wheel inertia about its axle [kg m^2]
    I_p: float = 86.67  # pendulum inertia about the axle [kg m^2]
    g: float = 10.0  # [m/s^2]
    b_pw: float = 0.0  # pendulum-wheel viscous friction [N m s/rad]
    Ts: float = 0.01  # gyro sample period [s]

    def __post_init__(self):
        _check_positive(self, ("r", "l", "m", "M", "I_w", "I_p", "g", "b_pw", "Ts"), allow_zero=("b_pw",))


@dataclass(frozen=True)
class PendulumKinematics:
    phi: float = 0.0
    phi_dot: float = 0.0
    phi_ddot: float = 0.0


@dataclass(frozen=True)
class PlantState:
    phi: float = 0.0
    phi_dot: float = 0.0
    x: float = 0.0
    x_dot: float = 0.0
    wheel_angle: float = 0.0
    wheel_rate: float = 0.0
    t: float = 0.0

    @classmethod
    def rolling(cls, params, phi=0.0, phi_dot=0.0, x=0.0, x_dot=0.0, t=0.0):
        """Build a state whose wheel coordinates satisfy the rolling constraint."""
        return cls(phi, phi_dot, x, x_dot, x / params.r, x_dot / params.r, t)


class PlantDerivative(NamedTuple):
    phi_dot: float
    phi_ddot: float
    x_dot: float
    x_ddot: float
    wheel_rate: float
    wheel_accel: float


class PlantModel(enum.Enum):
    AS_PRINTED = "as_printed"
    CORRECTED = "corrected"


def friction_torque(params, wheel_rate, pendulum_rate):
    """Viscous torque between wheel and pendulum."""
    return params.b_pw * (wheel_rate - pendulum_rate)


def cog_kinematics(params, phi, x):
    """Return ``(x_cog, z_cog)`` of the centre of gravity in the ground frame."""
    return params.l * math.sin(phi) + x, params.l * math.cos(phi)


def cog_acceleration(params, kin, x_ddot):
    """Return ``(ax, az)`` of the centre of gravity in the ground frame."""
    s, c = math.sin(kin.phi), math.cos(kin.phi)
    l = params.l
    ax = kin.phi_ddot * l * c - kin.phi_dot**2 * l * s + x_ddot
    az = -(kin.phi_dot**2) * l * c - kin.phi_ddot * l * s
    return ax, az


def pendulum_torque(params, phi, phi_ddot, x_ddot, tau_f):
    """Pendulum torque about the axle, with the inertia term exactly as published."""
    p = params
    return (p.I_p - p.M * p.l**2) * phi_ddot - 2.0 * tau_f - p.M * p.l * math.cos(phi) * x_ddot


def _wheel_inertia_coefficient(p):
    return p.I_w / p.r + p.r * p.m - p.r * p.M / 2.0


def wheel_torque(params, x_ddot, kin, tau_f):
    """Torque each wheel motor must deliver for the given motion."""
    p = params
    s, c = math.sin(kin.phi), math.cos(kin.phi)
    coupling = p.r * p.M / 2.0 * (-kin.phi_ddot * p.l * c + kin.phi_dot**2 * p.l * s)
    return _wheel_inertia_coefficient(p) * x_ddot + tau_f + coupling


def _chassis_terms(p, phi, phi_dot):
    # x_ddot = (A * phi_ddot - B) / D
    s, c = math.sin(phi), math.cos(phi)
    A = -p.I_p / 2.0 + p.M * p.l**2 / 2.0 + p.r * p.M * p.l / 2.0 * c
    B = p.r * p.M * p.l / 2.0 * s * phi_dot**2
    D = _wheel_inertia_coefficient(p) - p.M * p.l / 2.0 * c
    if not abs(D) >= DENOMINATOR_GUARD:
        raise SingularDenominator(f"chassis acceleration denominator {D!r} at phi={phi!r}")
    return A, B, D


def chassis_acceleration(params, kin):
    """Chassis acceleration implied by the pendulum motion (published closed form).

    Raises:
        SingularDenominator: if ``|I_w/r + r m - r M/2 - (M l/2) cos(phi)| < 1e-9``.
    """
    A, B, D = _chassis_terms(params, kin.phi, kin.phi_dot)
    return (A * kin.phi_ddot - B) / D


def rederive_chassis_acceleration(params, kin, tau_f):
    """Solve ``pendulum_torque == wheel_torque`` for the chassis acceleration.

    Diagnostic only: the closed form in :func:`chassis_acceleration` does not
    agree with this elimination for the published coefficients. The residual
    ``f(a) = pendulum_torque(a) - wheel_torque(a)`` is affine in ``a``, so two
    evaluations determine it; the root is then polished with one Newton step.
    """

    def residual(a):
        return pendulum_torque(params, kin.phi, kin.phi_ddot, a, tau_f) - wheel_torque(params, a, kin, tau_f)

    f0 = residual(0.0)
    slope = residual(1.0) - f0
    if abs(slope) < SLOPE_GUARD:
        raise DegenerateElimination(f"elimination slope {slope!r} is degenerate")
    root = -f0 / slope
    return root - residual(root) / slope


def plant_derivative(params, state, applied_torque, model=PlantModel.CORRECTED, phi_ddot_prev=0.0):
    """Time derivative of the plant state under ``applied_torque`` about the axle.

    ``applied_torque`` is the pendulum torque (both wheels combined).
    ``phi_ddot_prev`` only matters for :attr:`PlantModel.AS_PRINTED`, where
    the chassis acceleration is evaluated at the previous step's pitch
    acceleration.
    """
    p = params
    model = PlantModel(model)
    tau_f = friction_torque(p, state.wheel_rate, state.phi_dot)
    c = math.cos(state.phi)
    A, B, D = _chassis_terms(p, state.phi, state.phi_dot)
    if model is PlantModel.AS_PRINTED:
        x_ddot = (A * phi_ddot_prev - B) / D
        phi_ddot = (applied_torque + 2.0 * tau_f + p.M * p.l * c * x_ddot) / (p.I_p - p.M * p.l**2)
    else:
        coupling = p.M * p.l * c / D
        effective_inertia = p.I_p + p.M * p.l**2 - coupling * A
        if not abs(effective_inertia) >= DENOMINATOR_GUARD:
            raise SingularDenominator(f"effective inertia {effective_inertia!r} at phi={state.phi!r}")
        gravity = p.M * p.g * p.l * math.sin(state.phi)
        phi_ddot = (applied_torque + 2.0 * tau_f - coupling * B + gravity) / effective_inertia
        x_ddot = (A * phi_ddot - B) / D
    return PlantDerivative(state.phi_dot, phi_ddot, state.x_dot, x_ddot, state.wheel_rate, x_ddot / p.r)
