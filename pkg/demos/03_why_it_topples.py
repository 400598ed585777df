"""
Why the predictive law cannot balance the vehicle
=================================================

Linearises the one-step predictive torque law around upright by finite
differences and compares its stiffness with gravity's.
"""

from twptr import ControllerState, GyroSample, RobotParams, mpc_step

p = RobotParams()


def torque(phi_est, omega, alpha):
    state = ControllerState(phi_est=phi_est, omega_prev=omega, alpha_prev=alpha, last_seq=0)
    pred, _ = mpc_step(p, state, GyroSample.at(1, p.Ts, omega))
    return pred.tau_cmd


h = 1e-6
d_phi = (torque(h, 0, 0) - torque(-h, 0, 0)) / (2 * h)
d_omega = (torque(0, h, 0) - torque(0, -h, 0)) / (2 * h)
d_alpha = (torque(0, 0, h) - torque(0, 0, -h)) / (2 * h)

# %%
# Sensitivities at upright
# ------------------------
print(f"d tau / d phi   = {d_phi:+.4f} N m/rad")
print(f"d tau / d omega = {d_omega:+.4f} N m s/rad")
print(f"d tau / d alpha = {d_alpha:+.4f} N m s^2/rad")
print(f"gravity stiffness M g l = {p.M * p.g * p.l:.0f} N m/rad")

# %%
# Angle feedback only appears through omega^2 sin(phi), which vanishes to
# first order; even at omega = 4 rad/s it stays well below gravity.
d_phi_moving = (torque(0.01 + h, 4.0, 0) - torque(0.01 - h, 4.0, 0)) / (2 * h)
print(f"d tau / d phi at omega=4: {d_phi_moving:+.4f} N m/rad")
