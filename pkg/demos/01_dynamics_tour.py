"""
A tour of the vehicle equations
===============================

Evaluates the rigid-body model at a few hand-checkable points and shows the
two places where the published equations need care: the negative composite
inertia, and the chassis-acceleration closed form that does not match the
elimination it is derived from.
"""

import math

import numpy as np

from twptr import PendulumKinematics, PlantModel, PlantState, RobotParams
from twptr import chassis_acceleration, pendulum_torque, plant_derivative, rederive_chassis_acceleration, wheel_torque

p = RobotParams()
print(p)

# %%
# Unit responses of the two torque equations
# -------------------------------------------
# One unit of pitch acceleration through the pendulum equation, one unit of
# chassis acceleration through the wheel equation.
print("pendulum torque per unit phi_ddot:", pendulum_torque(p, 0.0, 1.0, 0.0, 0.0))
print("wheel torque per unit x_ddot:    ", wheel_torque(p, 1.0, PendulumKinematics(), 0.0))
print("composite inertia I_p - M l^2:   ", p.I_p - p.M * p.l**2, "(negative!)")

# %%
# Closed form versus elimination
# ------------------------------
# Setting the two torques equal and solving for the chassis acceleration
# should give the closed form back. It does not.
for phidd in (1.0, -1.0, 10.0):
    kin = PendulumKinematics(0.0, 0.0, phidd)
    print(f"phi_ddot={phidd:+5.1f}  closed form {chassis_acceleration(p, kin):+.6f}"
          f"  elimination {rederive_chassis_acceleration(p, kin, 0.0):+.6f}")

# %%
# Plant models
# ------------
# The corrected model falls over (gravity), the printed one has no gravity and
# an inverted response to torque.
phis = np.linspace(-0.2, 0.2, 5)
for model in PlantModel:
    acc = [plant_derivative(p, PlantState(phi=phi), 0.0, model).phi_ddot for phi in phis]
    print(f"{model.value:>10}: phi_ddot(phi) =", np.round(acc, 3))
print("as_printed response to +1 N m:", plant_derivative(p, PlantState(), 1.0, PlantModel.AS_PRINTED).phi_ddot)
print("corrected  response to +1 N m:", plant_derivative(p, PlantState(), 1.0, PlantModel.CORRECTED).phi_ddot)
print("gravity stiffness M g l =", p.M * p.g * p.l, "N m/rad; small-angle toppling rate",
      math.sqrt(plant_derivative(p, PlantState(phi=1e-6), 0.0).phi_ddot / 1e-6), "1/s")
