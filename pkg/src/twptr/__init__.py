"""Simulation, control and software-in-the-loop harness for a two-wheeled
self-balancing personal transporter."""

from twptr.closed_loop import (
    CSV_COLUMNS,
    NO_DISTURBANCE,
    Comparison,
    DelayTarget,
    Disturbance,
    DisturbanceMode,
    Metrics,
    ScenarioConfig,
    ScenarioKind,
    Trajectory,
    TrajectorySample,
    compare_runs,
    compute_metrics,
    rider_disturbance,
    run_scenario,
)
from twptr.config import RunConfig, load_config
from twptr.dynamics import (
    PendulumKinematics,
    PlantModel,
    PlantState,
    RobotParams,
    chassis_acceleration,
    cog_acceleration,
    cog_kinematics,
    friction_torque,
    pendulum_torque,
    plant_derivative,
    rederive_chassis_acceleration,
    wheel_torque,
)
from twptr.errors import *  # noqa: F401,F403
from twptr.hil import SessionConfig, controller_client, decode, encode, plant_serve, sync_check
from twptr.motor import (
    DelayLine,
    MotorParams,
    MotorState,
    back_emf,
    delay_push,
    motor_step,
    motor_torque,
    required_current,
    tdc_voltage,
)
from twptr.mpc import ControllerState, GyroSample, Prediction, mpc_step
from twptr.ode import StepSpec, integrate, rk4_step

__version__ = "0.1.0"
