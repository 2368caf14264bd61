"""Numerical integration: the Lorentz ODE, 1-D quadrature, drift diagnostics."""

import heapq
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import (InconsistentICError, IntegrationError, QuadratureAccuracyError,
                     QuadratureDomainError)
from .fields import KillingField, State6, to_canonical

UNIT_SPEED_TOL = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.1
    t_end: float = 10.0
    sample_dt: float = 0.01

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "t_end", "sample_dt"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
        if self.rel_tol < 1e-14:
            raise ValueError(f"rel_tol must be >= 1e-14, got {self.rel_tol!r}")

    def sample_times(self):
        n = int(math.floor(self.t_end / self.sample_dt + 1e-9))
        t = np.arange(n + 1) * self.sample_dt
        if self.t_end - t[-1] > 1e-12 * max(1.0, self.t_end):
            t = np.append(t, self.t_end)
        else:
            t[-1] = min(t[-1], self.t_end)
        return t


class TrajectorySample(NamedTuple):
    t: float
    pos: tuple
    vel: tuple
    speed_drift: float
    p0_drift: float
    q0_drift: float


def _prime_integrals(pos, vel):
    """(x'y - y'x, z' + (x^2 + y^2)/2) in coordinates where the axis is z."""
    x, y = pos[..., 0], pos[..., 1]
    u, v, w = vel[..., 0], vel[..., 1], vel[..., 2]
    return u * y - v * x, w + 0.5 * (x * x + y * y)


@dataclass
class SampleTable:
    """Column store of :class:`TrajectorySample` rows.

    Iterating yields ``TrajectorySample`` tuples; the arrays are there for
    vectorised post-processing.
    """

    t: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    speed_drift: np.ndarray
    p0_drift: np.ndarray
    q0_drift: np.ndarray

    @classmethod
    def from_states(cls, field, t, pos, vel, ic=None):
        """Build a table and its drift columns.

        The p0/q0 drifts are measured against ``ic`` (default: the first row)
        and are only defined for rotational fields; they are zero otherwise.
        """
        t = np.asarray(t, dtype=float)
        pos = np.asarray(pos, dtype=float).reshape(-1, 3)
        vel = np.asarray(vel, dtype=float).reshape(-1, 3)
        speed = np.abs(np.linalg.norm(vel, axis=1) - 1.0)
        if field.is_rotation:
            if ic is None:
                ic = State6(pos[0], vel[0])
            cp = to_canonical(pos, field.axis)
            cv = to_canonical(vel, field.axis)
            l0, q0 = _prime_integrals(to_canonical(ic.pos, field.axis),
                                      to_canonical(ic.vel, field.axis))
            lt, qt = _prime_integrals(cp, cv)
            p0d = np.abs(lt - l0)
            q0d = np.abs(qt - q0)
        else:
            p0d = np.zeros_like(t)
            q0d = np.zeros_like(t)
        return cls(t, pos, vel, speed, p0d, q0d)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i):
        return TrajectorySample(float(self.t[i]), tuple(self.pos[i]), tuple(self.vel[i]),
                                float(self.speed_drift[i]), float(self.p0_drift[i]),
                                float(self.q0_drift[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def states(self):
        return np.hstack([self.pos, self.vel])


def check_unit_speed(ic, tol=UNIT_SPEED_TOL):
    if abs(ic.speed - 1.0) > tol:
        raise InconsistentICError(f"initial speed {ic.speed!r} is not 1 within {tol}")


def integrate_trajectory(field, ic, cfg=IntegratorConfig()):
    """Integrate gamma'' = V x gamma' from ``ic`` and sample it uniformly.

    Dormand-Prince 5(4) with PI step-size control and its 4th-order dense
    output.  Returns a :class:`SampleTable` on ``cfg.sample_times()``.

    Raises
    ------
    InconsistentICError
        If the initial velocity is not unit length within 1e-12.
    IntegrationError
        On step-size underflow or step budget exhaustion.
    """
    check_unit_speed(ic)
    times = cfg.sample_times()
    out, (status, t_last, _, _) = _backend.dopri_linear(
        field.omega, field.offset, ic.as_array(), times,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step)
    if status == 1:
        raise IntegrationError("step size underflow", t_last)
    if status == 2:
        raise IntegrationError("step budget exhausted", t_last)
    return SampleTable.from_states(field, times, out[:, :3], out[:, 3:], ic)


def drift_report(samples):
    """(max speed drift, max p0 drift, max q0 drift) over the samples."""
    if isinstance(samples, SampleTable):
        if not len(samples):
            raise ValueError("empty sample table")
        return (float(samples.speed_drift.max()), float(samples.p0_drift.max()),
                float(samples.q0_drift.max()))
    rows = list(samples)
    if not rows:
        raise ValueError("empty sample list")
    return (max(r.speed_drift for r in rows), max(r.p0_drift for r in rows),
            max(r.q0_drift for r in rows))


# 15-point Kronrod extension of the 7-point Gauss rule.
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK15 = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[[13, 11, 9]] = _WG[:3]
_WG15[7] = _WG[3]


def _gk15(fn, a, b, vectorized):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    try:
        if vectorized:
            fx = np.asarray(fn(x), dtype=float)
        else:
            fx = np.array([fn(float(xi)) for xi in x], dtype=float)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise QuadratureDomainError(f"integrand failed on [{a!r}, {b!r}]: {exc}") from exc
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise QuadratureDomainError(f"integrand not finite at {bad!r}")
    k = half * float(_WK15 @ fx)
    g = half * float(_WG15 @ fx)
    return k, abs(k - g)


def quad_adaptive(fn, a, b, tol=1e-10, *, singular=None, vectorized=False, limit=5000):
    """Globally adaptive Gauss-Kronrod (7/15) quadrature with absolute tolerance.

    Parameters
    ----------
    fn : callable
        Integrand; scalar in, scalar out (array in/out if ``vectorized``).
    a, b : float
        Limits, ``a <= b``.
    tol : float
        Target absolute error.  The estimate is floored at 50 ulp of the
        result, below which rounding dominates.
    singular : {None, "left", "right"}
        Remove an inverse-square-root endpoint singularity by substituting
        zeta = a + s^2 (or b - s^2) before integrating.  ``fn`` is then
        evaluated within rounding of the endpoint, so a tolerance below the
        conditioning of ``fn`` there can drive bisection into the singularity.

    Raises
    ------
    QuadratureDomainError
        If the integrand returns a non-finite value or raises an arithmetic error.
    QuadratureAccuracyError
        If ``limit`` subintervals do not reach the tolerance.
    """
    a = float(a)
    b = float(b)
    if b < a:
        raise ValueError(f"need a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return 0.0
    if singular == "left":
        if vectorized:
            g = lambda s: 2.0 * s * np.asarray(fn(a + s * s))
        else:
            g = lambda s: 2.0 * s * fn(a + s * s)
        return quad_adaptive(g, 0.0, math.sqrt(b - a), tol, vectorized=vectorized, limit=limit)
    if singular == "right":
        if vectorized:
            g = lambda s: 2.0 * s * np.asarray(fn(b - s * s))
        else:
            g = lambda s: 2.0 * s * fn(b - s * s)
        return quad_adaptive(g, 0.0, math.sqrt(b - a), tol, vectorized=vectorized, limit=limit)
    if singular is not None:
        raise ValueError(f"singular must be None, 'left' or 'right', got {singular!r}")

    val, err = _gk15(fn, a, b, vectorized)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    while total_err > max(tol, 50 * np.finfo(float).eps * abs(total)):
        if len(heap) >= limit:
            raise QuadratureAccuracyError(
                f"{limit} subintervals used, error estimate {total_err:.3e} > tol {tol:.3e}")
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureAccuracyError(f"interval [{lo!r}, {hi!r}] cannot be split further")
        v1, e1 = _gk15(fn, lo, mid, vectorized)
        v2, e2 = _gk15(fn, mid, hi, vectorized)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    # re-sum to shed the running-update rounding
    return math.fsum(item[3] for item in heap)


def quad_riemann(fn, a, b, n):
    """Left-endpoint Riemann sum with ``n`` equal panels."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    h = (b - a) / n
    return h * sum(fn(a + k * h) for k in range(n))


def planar_time_integrand(x):
    """1 / sqrt(x (4 - x^2)), the planar q0 = 0 time integrand in f = rho^2."""
    return 1.0 / math.sqrt(x * (4.0 - x * x))


def sampled_planar_profile(rho0, *, f_max=2.0, big_n=1000, n=1000, a=0.001, method="riemann"):
    """Re-run the sampled (rho, z) construction of the planar q0 = 0 curve.

    The rho^2 range [rho0^2, f_max] is split into ``big_n`` steps.  For each
    node b the time integral from ``a`` to b is computed (``method`` is
    "riemann" with ``n`` left panels, or "adaptive"), and z is accumulated
    as z_{K+1} = z_K - (I_{K+1} - I_K) f_K / 2.

    Returns
    -------
    rho, z, integral : ndarrays of length big_n + 1
    """
    step = (f_max - rho0 * rho0) / big_n
    f = rho0 * rho0 + step * np.arange(big_n + 1)
    integral = np.empty_like(f)
    for i, b in enumerate(f):
        if method == "riemann":
            integral[i] = quad_riemann(planar_time_integrand, a, b, n)
        elif method == "adaptive":
            if b >= 2.0:
                integral[i] = (quad_adaptive(planar_time_integrand, a, 1.0, 1e-12)
                               + quad_adaptive(planar_time_integrand, 1.0, b, 1e-12,
                                               singular="right"))
            else:
                integral[i] = quad_adaptive(planar_time_integrand, a, b, 1e-12)
        else:
            raise ValueError(f"unknown method {method!r}")
    z = np.zeros_like(f)
    for i in range(big_n):
        z[i + 1] = z[i] - 0.5 * (integral[i + 1] - integral[i]) * f[i]
    return np.sqrt(f), z, integral
