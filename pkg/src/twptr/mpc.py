"""One-step predictive torque layer.

At each gyro sample the controller

1. integrates the measured pitch rate into an angle estimate (trapezoid),
2. holds the pitch acceleration at its previous-sample value,
3. predicts the next-sample pitch with one RK4 step over the sample period,
4. evaluates the chassis acceleration and the wheel torque at the prediction.

The horizon is a single sample and there is no cost function; the "model
predictive" part is the model-based one-step look-ahead.
"""

from dataclasses import dataclass, replace

from twptr.dynamics import PendulumKinematics, chassis_acceleration, friction_torque, wheel_torque
from twptr.errors import SequenceGap
from twptr.ode import rk4_step


@dataclass(frozen=True)
class GyroSample:
    seq: int
    t: float
    omega: float

    @classmethod
    def at(cls, seq, Ts, omega):
        return cls(seq, seq * Ts, omega)


@dataclass(frozen=True)
class ControllerState:
    phi_est: float = 0.0
    omega_prev: float = 0.0
    alpha_prev: float = 0.0
    tau_prev: float = 0.0
    last_seq: int = -1


@dataclass(frozen=True)
class Prediction:
    phi_next: float
    x_ddot_next: float
    tau_cmd: float
    # Present-sample rate estimate; logged, not used downstream.
    phi_dot_est: float = 0.0
    alpha: float = 0.0


def _check_sequence(state, sample):
    expected = state.last_seq + 1
    if sample.seq != expected:
        raise SequenceGap(f"expected gyro seq {expected}, got {sample.seq}")


def estimate_angle(state, sample, Ts):
    """Trapezoidal update of the pitch estimate from the gyro rate."""
    _check_sequence(state, sample)
    return state.phi_est + Ts * (state.omega_prev + sample.omega) / 2.0


def estimate_angular_accel(omega_now, omega_prev, Ts):
    return (omega_now - omega_prev) / Ts


def mpc_step(params, state, sample, wheel_rate=0.0):
    """Run one controller sample.

    ``wheel_rate`` is the latest encoder reading; it only enters through the
    pendulum-wheel friction torque, which vanishes for ``b_pw == 0``.

    Returns:
        ``(Prediction, ControllerState)``; the input state is not modified.
    """
    Ts = params.Ts
    phi = estimate_angle(state, sample, Ts)
    omega = sample.omega
    alpha = state.alpha_prev

    phi_next, phi_dot_est = rk4_step(lambda t, y: (y[1], alpha), sample.t, (phi, omega), Ts)
    kin = PendulumKinematics(phi_next, omega, alpha)
    x_ddot = chassis_acceleration(params, kin)
    tau_f = friction_torque(params, wheel_rate, omega)
    tau = wheel_torque(params, x_ddot, kin, tau_f)

    new_state = replace(
        state,
        phi_est=phi,
        omega_prev=omega,
        alpha_prev=estimate_angular_accel(omega, state.omega_prev, Ts),
        tau_prev=tau,
        last_seq=sample.seq,
    )
    return Prediction(phi_next, x_ddot, tau, phi_dot_est, alpha), new_state
