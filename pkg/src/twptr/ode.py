"""Fixed-step classic Runge-Kutta integration.

States are plain tuples (or anything indexable) of floats; the derivative
function has the signature ``f(t, y) -> sequence``. Scalars are accepted too.
"""

import math
from dataclasses import dataclass

from twptr.errors import NonFiniteDerivative, ValidationError


@dataclass(frozen=True)
class StepSpec:
    h: float = 0.01
    substeps: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValidationError("h", f"must be > 0, got {self.h!r}")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValidationError("substeps", f"must be a positive integer, got {self.substeps!r}")

    @property
    def dt(self):
        return self.h / self.substeps


def _finite(stage, values):
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteDerivative(f"stage {stage} produced {v!r}")
    return values


def rk4_step(f, t, y, h):
    """Advance ``y`` by one classic fourth-order Runge-Kutta step of size ``h``.

    Raises:
        NonFiniteDerivative: if any stage evaluates to inf or nan.
    """
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h!r}")
    scalar = isinstance(y, (int, float))
    y0 = (float(y),) if scalar else tuple(y)
    g = (lambda tt, yy: (f(tt, yy[0]),)) if scalar else f

    half = 0.5 * h
    k1 = _finite(1, tuple(g(t, y0)))
    k2 = _finite(2, tuple(g(t + half, tuple(a + half * b for a, b in zip(y0, k1)))))
    k3 = _finite(3, tuple(g(t + half, tuple(a + half * b for a, b in zip(y0, k2)))))
    k4 = _finite(4, tuple(g(t + h, tuple(a + h * b for a, b in zip(y0, k3)))))
    sixth = h / 6.0
    out = tuple(a + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y0, k1, k2, k3, k4))
    return out[0] if scalar else out


def integrate(f, t, y, spec):
    """Advance over one sample period ``spec.h`` in ``spec.substeps`` RK4 steps."""
    dt = spec.dt
    for j in range(spec.substeps):
        y = rk4_step(f, t + j * dt, y, dt)
    return y
