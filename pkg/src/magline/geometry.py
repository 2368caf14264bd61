"""Curvature and torsion of space curves."""

import numpy as np

from .fields import cross, eval_field, lorentz_force

# Central-difference weights at offsets 1..4 (antisymmetric for odd orders).
_D1 = np.array([4 / 5, -1 / 5, 4 / 105, -1 / 280])              # 8th order
_D2_CENTER = -205 / 72
_D2 = np.array([8 / 5, -1 / 5, 8 / 315, -1 / 560])              # 8th order
_D3 = np.array([-61 / 30, 169 / 120, -3 / 10, 7 / 240])         # 6th order, weight at +j


def frenet_from_derivatives(d1, d2, d3):
    """kappa = |d1 x d2| / |d1|^3 and tau = det(d1, d2, d3) / |d1 x d2|^2.

    Torsion is NaN where the curvature vanishes (straight pieces).
    """
    d1 = np.asarray(d1, dtype=float)
    b = cross(d1, d2)
    bn2 = np.sum(b * b, axis=-1)
    speed = np.linalg.norm(d1, axis=-1)
    kappa = np.sqrt(bn2) / speed ** 3
    with np.errstate(invalid="ignore", divide="ignore"):
        tau = np.where(bn2 > 0, np.sum(b * np.asarray(d3), axis=-1) / np.where(bn2 > 0, bn2, 1.0),
                       np.nan)
    return kappa, tau


def curve_derivatives(curve, t, h):
    """First three derivatives of ``curve`` (t -> (..., 3) positions) by central stencils."""
    t = np.asarray(t, dtype=float)
    plus = [np.asarray(curve(t + j * h)) for j in range(1, 5)]
    minus = [np.asarray(curve(t - j * h)) for j in range(1, 5)]
    center = np.asarray(curve(t))
    d1 = sum(c * (p - m) for c, p, m in zip(_D1, plus, minus)) / h
    d2 = (_D2_CENTER * center + sum(c * (p + m) for c, p, m in zip(_D2, plus, minus))) / h ** 2
    d3 = sum(c * (p - m) for c, p, m in zip(_D3, plus, minus)) / h ** 3
    return d1, d2, d3


def frenet_numeric(curve, t, h=1e-2):
    """(kappa, tau) of ``curve`` at ``t`` from finite differences of positions."""
    return frenet_from_derivatives(*curve_derivatives(curve, t, h))


def frenet_magnetic(field, pos, vel):
    """(kappa, tau) along a magnetic curve of ``field`` from the state alone.

    gamma'' = V x gamma' and gamma''' = (dV gamma') x gamma' + V x gamma'',
    so no differencing is needed.
    """
    pos = np.asarray(pos, dtype=float)
    vel = np.asarray(vel, dtype=float)
    acc = lorentz_force(field, pos, vel)
    dv = vel @ field.jacobian().T
    jerk = cross(dv, vel) + cross(eval_field(field, pos), acc)
    return frenet_from_derivatives(vel, acc, jerk)
