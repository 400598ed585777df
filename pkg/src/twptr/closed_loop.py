"""Scenario orchestration: rider disturbance, the controller ladder, metrics.

The loop runs at the gyro rate. For sample ``k`` (``t = k Ts``):

1. the plant integrates the previous sample with the actuation then held,
2. the gyro reads the pitch rate, plus the rider's lean rate,
3. the controller turns the reading into a torque (and, for the
   hierarchical scenario, a voltage),
4. the actuator chain (delay line, motor) updates the held actuation and
   the sample is recorded.

The plant side (:class:`PlantSide`) and controller side
(:class:`ControllerSide`) are kept apart so the networked harness in
:mod:`twptr.hil` can run them in separate processes with identical results.
"""

import enum
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from twptr.dynamics import PlantModel, PlantState, RobotParams, plant_derivative
from twptr.errors import (
    DivisionByZeroBase,
    EmptyTrajectory,
    ScenarioAborted,
    TwptrError,
    ValidationError,
)
from twptr.motor import DelayLine, MotorParams, MotorState, delay_push, motor_step, motor_torque, tdc_voltage
from twptr.mpc import ControllerState, GyroSample, mpc_step
from twptr.ode import StepSpec, rk4_step

WHEELS = 2


class ScenarioKind(enum.Enum):
    UNCONTROLLED = "uncontrolled"
    MPC_IDEAL = "mpc"
    MPC_DELAYED = "mpc-delay"
    HIERARCHICAL = "hierarchical"


class DisturbanceMode(enum.Enum):
    MEASUREMENT = "measurement"
    STATE = "state"


class DelayTarget(enum.Enum):
    VOLTAGE = "voltage"
    TORQUE = "torque"


@dataclass(frozen=True)
class Disturbance:
    """Rider-induced pitch rate ``a1 sin(w1 t) + a2 cos(w2 t)``."""

    a1: float = 5.0
    w1: float = 50.0
    a2: float = 4.0
    w2: float = 20.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValidationError(f"disturbance_{f.name}", f"must be finite, got {value!r}")
        for name in ("w1", "w2"):
            if getattr(self, name) == 0.0:
                raise ValidationError(f"disturbance_{name}", "frequency must be non-zero")

    def rate(self, t):
        return rider_disturbance(t, self.a1, self.w1, self.a2, self.w2)

    def lean(self, t):
        """Zero-mean antiderivative of :meth:`rate`: the rider's lean angle."""
        return -self.a1 / self.w1 * math.cos(self.w1 * t) + self.a2 / self.w2 * math.sin(self.w2 * t)


NO_DISTURBANCE = Disturbance(0.0, 50.0, 0.0, 20.0)


def rider_disturbance(t, a1=5.0, w1=50.0, a2=4.0, w2=20.0):
    return a1 * math.sin(w1 * t) + a2 * math.cos(w2 * t)


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind = ScenarioKind.HIERARCHICAL
    duration: float = 10.0
    robot: RobotParams = field(default_factory=RobotParams)
    motor: MotorParams = field(default_factory=MotorParams)
    plant_model: PlantModel = PlantModel.CORRECTED
    disturbance: Disturbance = field(default_factory=Disturbance)
    disturbance_mode: DisturbanceMode = DisturbanceMode.MEASUREMENT
    delay_target: DelayTarget = DelayTarget.VOLTAGE
    substeps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        object.__setattr__(self, "plant_model", PlantModel(self.plant_model))
        object.__setattr__(self, "disturbance_mode", DisturbanceMode(self.disturbance_mode))
        object.__setattr__(self, "delay_target", DelayTarget(self.delay_target))
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise ValidationError("duration", f"must be >= 0, got {self.duration!r}")
        ratio = self.duration / self.robot.Ts
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValidationError("duration", f"{self.duration!r} is not a whole number of samples")
        StepSpec(self.robot.Ts, self.substeps)

    @property
    def n_samples(self):
        """Recorded samples, both endpoints included; zero for a zero-length run."""
        n = int(round(self.duration / self.robot.Ts))
        return n + 1 if n > 0 else 0

    def with_kind(self, kind):
        return replace(self, kind=ScenarioKind(kind))


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    phi: float
    phi_dot: float
    tau_cmd: float
    V_cmd: float
    wheel_rate: float
    x: float
    x_dot: float


CSV_COLUMNS = ("t", "phi", "phi_dot", "tau_cmd", "v_cmd", "wheel_rate", "x", "x_dot")


@dataclass
class Trajectory:
    """Time-ordered record of one run.

    ``tau_cmd`` is the per-wheel torque applied over the following sample
    (after the delay line, or the motor's developed torque in the
    hierarchical scenario). ``V_cmd`` is the voltage the controller issued.
    ``encoder`` holds the speed reported back to the controller and
    ``phi_dot_est`` the controller's present-sample rate estimate; neither
    is written to CSV.
    """

    samples: list = field(default_factory=list)
    encoder: list = field(default_factory=list)
    phi_dot_est: list = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, index):
        return self.samples[index]

    def column(self, name):
        attr = "V_cmd" if name == "v_cmd" else name
        return np.array([getattr(s, attr) for s in self.samples], dtype=float)

    def rows(self):
        return [(s.t, s.phi, s.phi_dot, s.tau_cmd, s.V_cmd, s.wheel_rate, s.x, s.x_dot) for s in self.samples]


@dataclass(frozen=True)
class Metrics:
    max_abs_phi: float
    max_abs_tau: float
    rms_phi: float


@dataclass(frozen=True)
class Comparison:
    displacement_reduction: float
    torque_reduction: float
    stability_increase: float


class PlantSide:
    """Plant, actuator delay and motor: everything behind the gyro and encoder."""

    def __init__(self, config):
        self.config = config
        self.params = config.robot
        self.spec = StepSpec(config.robot.Ts, config.substeps)
        self.k = 0
        self.state = PlantState()
        self.phi_ddot_prev = 0.0
        self.motor = MotorState()
        delay = config.motor.delay_samples
        delayed = config.kind is ScenarioKind.MPC_DELAYED or (
            config.kind is ScenarioKind.HIERARCHICAL and config.delay_target is DelayTarget.VOLTAGE
        )
        self.line = DelayLine(delay if delayed else 0)
        self.wheel_torque = 0.0
        self.voltage = 0.0

    @property
    def t(self):
        return self.k * self.params.Ts

    def _rhs(self, torque):
        p, model, prev = self.params, self.config.plant_model, self.phi_ddot_prev
        dist = self.config.disturbance
        state_side = self.config.disturbance_mode is DisturbanceMode.STATE

        def f(t, y):
            phi, phi_dot, x, x_dot = y
            s = PlantState(phi, phi_dot, x, x_dot, x / p.r, x_dot / p.r, t)
            d = plant_derivative(p, s, torque, model, prev)
            lean_rate = dist.rate(t) if state_side else 0.0
            return phi_dot + lean_rate, d.phi_ddot, x_dot, d.x_ddot

        return f

    def advance(self):
        """Integrate one sample period with the held actuation."""
        p = self.params
        hierarchical = self.config.kind is ScenarioKind.HIERARCHICAL
        s = self.state
        y = (s.phi, s.phi_dot, s.x, s.x_dot)
        t0 = self.t
        dt = self.spec.dt
        for j in range(self.spec.substeps):
            t = t0 + j * dt
            torque = motor_torque(self.config.motor, self.motor.i) if hierarchical else self.wheel_torque
            y = rk4_step(self._rhs(WHEELS * torque), t, y, dt)
            if hierarchical:
                self.motor = motor_step(self.config.motor, self.motor, self.voltage, dt)
            end = PlantState(y[0], y[1], y[2], y[3], y[2] / p.r, y[3] / p.r, t + dt)
            self.phi_ddot_prev = plant_derivative(
                p, end, WHEELS * torque, self.config.plant_model, self.phi_ddot_prev
            ).phi_ddot
        self.k += 1
        self.state = PlantState.rolling(p, y[0], y[1], y[2], y[3], self.t)

    def gyro(self):
        omega = self.state.phi_dot + self.config.disturbance.rate(self.t)
        return GyroSample(self.k, self.t, omega)

    def observed_phi(self):
        if self.config.disturbance_mode is DisturbanceMode.MEASUREMENT:
            return self.state.phi + self.config.disturbance.lean(self.t)
        return self.state.phi

    def actuate(self, tau_cmd=0.0, v_cmd=0.0):
        """Feed this sample's command into the actuator chain."""
        kind = self.config.kind
        if kind is ScenarioKind.HIERARCHICAL:
            self.voltage, self.line = delay_push(self.line, v_cmd)
        elif kind is ScenarioKind.UNCONTROLLED:
            self.wheel_torque = 0.0
        else:
            self.wheel_torque, self.line = delay_push(self.line, tau_cmd)

    def applied_torque(self):
        if self.config.kind is ScenarioKind.HIERARCHICAL:
            return motor_torque(self.config.motor, self.motor.i)
        return self.wheel_torque

    def encoder_speed(self):
        if self.config.kind is ScenarioKind.HIERARCHICAL:
            return self.motor.theta_dot
        return self.state.wheel_rate

    def record(self, gyro, v_cmd):
        s = self.state
        sample = TrajectorySample(
            self.t, self.observed_phi(), gyro.omega, self.applied_torque(), v_cmd, s.wheel_rate, s.x, s.x_dot
        )
        for f in fields(sample):
            value = getattr(sample, f.name)
            if not math.isfinite(value):
                raise ArithmeticError(f"non-finite {f.name} = {value!r}")
        return sample


class ControllerSide:
    """Predictive torque layer followed, in the hierarchical scenario, by TDC."""

    def __init__(self, params, motor, kind=ScenarioKind.HIERARCHICAL, delay_target=DelayTarget.VOLTAGE):
        self.params = params
        self.motor = motor
        self.kind = ScenarioKind(kind)
        self.state = ControllerState()
        self.speed = 0.0
        delay_target = DelayTarget(delay_target)
        torque_delay = self.kind is ScenarioKind.HIERARCHICAL and delay_target is DelayTarget.TORQUE
        self.line = DelayLine(motor.delay_samples if torque_delay else 0)
        self.tdc_tau_prev = 0.0
        self.last_prediction = None

    def command(self, sample):
        """Return ``(tau_cmd, v_cmd)`` for one gyro sample."""
        if self.kind is ScenarioKind.UNCONTROLLED:
            return 0.0, 0.0
        prediction, self.state = mpc_step(self.params, self.state, sample, self.speed)
        self.last_prediction = prediction
        tau = prediction.tau_cmd
        if self.kind is not ScenarioKind.HIERARCHICAL:
            return tau, 0.0
        tau_motor, self.line = delay_push(self.line, tau)
        v = tdc_voltage(self.motor, tau_motor, self.tdc_tau_prev, self.params.Ts, self.speed, prediction.phi_next)
        self.tdc_tau_prev = tau_motor
        return tau, v

    def observe_speed(self, speed):
        self.speed = speed


def run_scenario(config):
    """Run one scenario and return its :class:`Trajectory`.

    Raises:
        ScenarioAborted: on any numeric failure, carrying the sample index.
    """
    plant = PlantSide(config)
    controller = ControllerSide(config.robot, config.motor, config.kind, config.delay_target)
    traj = Trajectory()
    for k in range(config.n_samples):
        try:
            if k > 0:
                plant.advance()
            gyro = plant.gyro()
            tau, v = controller.command(gyro)
            plant.actuate(tau, v)
            speed = plant.encoder_speed()
            controller.observe_speed(speed)
            sample = plant.record(gyro, v)
        except (TwptrError, ArithmeticError, ValueError) as exc:
            raise ScenarioAborted(k, exc) from exc
        traj.samples.append(sample)
        traj.encoder.append(speed)
        pred = controller.last_prediction
        traj.phi_dot_est.append(pred.phi_dot_est if pred is not None else 0.0)
    return traj


def compute_metrics(traj):
    if len(traj) == 0:
        raise EmptyTrajectory("cannot compute metrics of an empty trajectory")
    phi = traj.column("phi")
    tau = traj.column("tau_cmd")
    return Metrics(
        max_abs_phi=float(np.max(np.abs(phi))),
        max_abs_tau=float(np.max(np.abs(tau))),
        rms_phi=float(np.sqrt(np.mean(phi * phi))),
    )


def compare_runs(base, improved):
    """Relative improvement of ``improved`` over ``base``.

    ``stability_increase`` is the ratio of peak displacements minus one, so
    a 44% displacement drop reads as a 78.6% stability increase.
    """
    if not (base.max_abs_phi > 0 and base.max_abs_tau > 0):
        raise DivisionByZeroBase(f"base metrics must be positive, got {base}")
    ratio = improved.max_abs_phi / base.max_abs_phi
    stability = base.max_abs_phi / improved.max_abs_phi - 1.0 if improved.max_abs_phi > 0 else math.inf
    return Comparison(
        displacement_reduction=1.0 - ratio,
        torque_reduction=1.0 - improved.max_abs_tau / base.max_abs_tau,
        stability_increase=stability,
    )
