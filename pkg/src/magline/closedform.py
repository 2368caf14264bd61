"""Explicit magnetic curves for every solvable case.

All Case-I radial profiles share one shape,

    rho^2(t) = (A k^2 - C sn^2(r t + t0)) / (k^2 - sn^2(r t + t0)),   sn modulus 1/k,

with A <= rho^2 <= B, C the remaining root of the radial cubic, k^2 = (B - C)/(B - A)
and r = sqrt(B - C) / 2.  The planar families are the special choices
(A, C) = (0, 2(q0 - 1)) and (2(q0 - 1), 0).  When A = 0 the curve reaches
the axis; there the signed radius sn * sqrt(-C / (k^2 - sn^2)) is used so the
curve passes through the axis instead of reflecting off it.

The angle and height need integrals of 1/rho^2 and rho^2 over time.  They
are tabulated once per trajectory over one period of rho^2 with adaptive
quadrature and completed inside a cell with a fixed Gauss-Legendre rule.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import elliptic
from .classify import (CLASSICAL_FIELD, EPS_CLASS, GENERAL_ELLIPTIC, HELIX_CASE_II,
                       PLANAR_ANNULUS, PLANAR_BOUNDED, PLANAR_SECH, CaseTag, classify,
                       invariants_from_ic)
from .errors import (ContractViolation, EllipticDomainError, InconsistentICError,
                     NonExistentTrajectory)
from .fields import KillingField, State6, from_canonical
from .integrate import check_unit_speed, quad_adaptive

_TABLE_CELLS = 64
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class CylindricalState:
    rho: float
    phi: float
    z: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho!r}")

    @classmethod
    def from_cartesian(cls, p):
        x, y, z = (float(v) for v in p)
        return cls(math.hypot(x, y), math.atan2(y, x), z)

    def to_cartesian(self):
        return np.array([self.rho * math.cos(self.phi), self.rho * math.sin(self.phi), self.z])


@dataclass(frozen=True)
class SolutionParams:
    """Everything an evaluator needs; hashable so quadrature tables can be cached.

    ``k`` follows the convention rho^2 = (A k^2 - C sn^2)/(k^2 - sn^2), so the
    sn modulus is ``modulus = 1/k``.  ``t0`` is a phase in the sn argument
    (in time units for the sech and helix cases).
    """

    case: CaseTag
    p0: float = 0.0
    q0: float = 0.0
    rho0: float = 0.0
    phi0: float = 0.0
    z0: float = 0.0
    t0: float = 0.0
    k: float = 1.0
    r: float = 1.0
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    eps: int = 1
    s: float = 0.0
    ic: Optional[State6] = None

    @property
    def modulus(self):
        return 1.0 / self.k

    @property
    def period(self):
        """Period of rho^2 in t for the sn cases."""
        return 2.0 * elliptic.complete_elliptic_k(self.modulus) / self.r


def _seed_phase(a_root, b_root, c_root, rho0_sq, k2, modulus, radial, r):
    """sn-argument u with rho^2 = rho0^2 and (rho^2)' = 2 ``radial``."""
    den = rho0_sq - c_root
    sn2 = k2 * (rho0_sq - a_root) / den
    cn2 = (a_root - c_root) * (b_root - rho0_sq) / ((b_root - a_root) * den)
    tol = 1e-9
    if sn2 < -tol or cn2 < -tol:
        raise InconsistentICError(
            f"rho0^2={rho0_sq!r} outside the admissible interval [{a_root!r}, {b_root!r}]")
    sn = math.sqrt(max(sn2, 0.0))
    cn = math.sqrt(max(cn2, 0.0))
    # Near a turning point sn or cn is the square root of a rounding-level
    # gap; (rho^2)' = 2 r k^2 (A - C) sn cn dn / (k^2 - sn^2)^2 fixes it instead.
    if min(sn2, cn2) < 1e-6:
        dn = math.sqrt(max(1.0 - sn * sn / k2, 0.0))
        scale = r * k2 * (a_root - c_root) / (k2 - sn * sn) ** 2
        if sn2 < cn2:
            sn = abs(radial) / (scale * cn * dn)
        else:
            cn = abs(radial) / (scale * sn * dn)
    try:
        u = elliptic.inverse_sn(min(sn, 1.0), modulus, cn=cn)
    except EllipticDomainError as exc:
        raise InconsistentICError(str(exc)) from exc
    if radial < 0:
        u = 2.0 * elliptic.complete_elliptic_k(modulus) - u
    return u


def _radial_rate(ic):
    x0, y0, _ = ic.pos
    u0, v0, _ = ic.vel
    return x0 * u0 + y0 * v0


def solve_params(tag, inv, ic):
    """Phase shift, modulus, scale and roots for ``tag`` from the initial data.

    ``inv`` and ``ic`` are in coordinates where the rotation axis is z.  The
    branch (increasing or decreasing rho at t = 0) follows the initial
    radial velocity.

    Raises
    ------
    ContractViolation
        If ``tag`` is not a solvable case.
    InconsistentICError
        If the initial radius is incompatible with the case.
    """
    base = dict(case=tag, p0=inv.p0, q0=inv.q0, rho0=inv.rho0, phi0=inv.phi0, z0=inv.z0, ic=ic)
    radial = _radial_rate(ic)
    kind = tag.kind
    if kind == PLANAR_BOUNDED:
        q0 = inv.q0
        if abs(q0) <= EPS_CLASS:
            a_root, b_root, c_root, k2, r = 0.0, 2.0, -2.0, 2.0, 1.0
        else:
            a_root, b_root, c_root = 0.0, 2.0 * (q0 + 1.0), 2.0 * (q0 - 1.0)
            k2, r = 2.0 / (q0 + 1.0), 1.0
        k = math.sqrt(k2)
        t0 = _seed_phase(a_root, b_root, c_root, inv.rho0 ** 2, k2, 1.0 / k, radial, r)
        return SolutionParams(**base, t0=t0, k=k, r=r, A=a_root, B=b_root, C=c_root)
    if kind == PLANAR_ANNULUS:
        q0 = inv.q0
        a_root, b_root, c_root = 2.0 * (q0 - 1.0), 2.0 * (q0 + 1.0), 0.0
        k2 = 0.5 * (q0 + 1.0)
        k = math.sqrt(k2)
        t0 = _seed_phase(a_root, b_root, c_root, inv.rho0 ** 2, k2, 1.0 / k, radial, k)
        return SolutionParams(**base, t0=t0, k=k, r=k, A=a_root, B=b_root, C=c_root)
    if kind == GENERAL_ELLIPTIC:
        a_root, b_root, c_root = tag.roots
        k2 = (b_root - c_root) / (b_root - a_root)
        k = math.sqrt(k2)
        r = 0.5 * math.sqrt(b_root - c_root)
        t0 = _seed_phase(a_root, b_root, c_root, inv.rho0 ** 2, k2, 1.0 / k, radial, r)
        return SolutionParams(**base, t0=t0, k=k, r=r, A=a_root, B=b_root, C=c_root)
    if kind == PLANAR_SECH:
        rho0 = inv.rho0
        gap = 4.0 - rho0 * rho0
        if gap < -1e-9:
            raise InconsistentICError(f"planar sech case needs rho0 <= 2, got {rho0!r}")
        root = math.sqrt(max(gap, 0.0))
        t0 = -0.5 * math.log((2.0 - root) / (2.0 + root))
        if radial < 0:
            t0 = -t0
        return SolutionParams(**base, t0=t0, A=0.0, B=4.0, C=0.0)
    if kind == HELIX_CASE_II:
        return SolutionParams(**base, eps=tag.eps)
    raise ContractViolation(f"no closed form for case {kind!r}")


class _SnProfile:
    """rho^2(t) = (A k^2 - C sn^2)/(k^2 - sn^2) with sn = sn(r t + t0, 1/k)."""

    def __init__(self, a_root, c_root, k2, r, t0):
        self.a = a_root
        self.c = c_root
        self.k2 = k2
        self.r = r
        self.t0 = t0
        self.modulus = 1.0 / math.sqrt(k2)
        self.period = 2.0 * elliptic.complete_elliptic_k(self.modulus) / r
        self._tables = {}

    def _sn(self, t):
        return elliptic.sncndn(self.r * np.asarray(t, dtype=float) + self.t0, self.modulus)

    def f(self, t):
        s, _, _ = self._sn(t)
        s2 = s * s
        return (self.a * self.k2 - self.c * s2) / (self.k2 - s2)

    def f_and_rate(self, t):
        s, c, d = self._sn(t)
        den = self.k2 - s * s
        f = (self.a * self.k2 - self.c * s * s) / den
        df = 2.0 * self.r * self.k2 * (self.a - self.c) * s * c * d / (den * den)
        return f, df

    def signed_radius(self, t):
        """(R, R') with R^2 = f, continuing through zero; needs A = 0."""
        s, c, d = self._sn(t)
        den = self.k2 - s * s
        amp = math.sqrt(-self.c)
        rad = amp * s / np.sqrt(den)
        rate = self.r * amp * self.k2 * c * d / den ** 1.5
        return rad, rate

    def _table(self, which):
        if which not in self._tables:
            fn = self.f if which == "f" else (lambda t: 1.0 / self.f(t))
            width = self.period / _TABLE_CELLS
            cells = [quad_adaptive(fn, i * width, (i + 1) * width, 1e-14, vectorized=True)
                     for i in range(_TABLE_CELLS)]
            self._tables[which] = (fn, width, np.concatenate([[0.0], np.cumsum(cells)]))
        return self._tables[which]

    def integral(self, t, which="f"):
        """Integral from 0 to t of f (``which="f"``) or of 1/f (``which="inv"``)."""
        fn, width, cum = self._table(which)
        t = np.asarray(t, dtype=float)
        n_per = np.floor(t / self.period)
        rem = t - n_per * self.period
        cell = np.clip(np.floor(rem / width), 0, _TABLE_CELLS - 1)
        lo = cell * width
        half = 0.5 * (rem - lo)
        nodes = (lo + half)[..., None] + half[..., None] * _GL_X
        partial = half * (fn(nodes) @ _GL_W)
        return n_per * cum[-1] + cum[cell.astype(int)] + partial


@lru_cache(maxsize=64)
def _profile(a_root, c_root, k2, r, t0):
    return _SnProfile(a_root, c_root, k2, r, t0)


def _profile_for(params):
    return _profile(params.A, params.C, params.k * params.k, params.r, params.t0)


def _result(pos, vel, with_velocity):
    return (pos, vel) if with_velocity else pos


def _planar_from_signed(params, prof, t, with_velocity):
    t = np.asarray(t, dtype=float)
    rad, rate = prof.signed_radius(t)
    c, s = math.cos(params.phi0), math.sin(params.phi0)
    z = params.z0 + params.q0 * t - 0.5 * prof.integral(t, "f")
    pos = np.stack([rad * c, rad * s, z], axis=-1)
    if not with_velocity:
        return pos
    vel = np.stack([rate * c, rate * s, params.q0 - 0.5 * rad * rad], axis=-1)
    return pos, vel


def _planar_from_profile(params, prof, t, with_velocity):
    t = np.asarray(t, dtype=float)
    f, df = prof.f_and_rate(t)
    rho = np.sqrt(f)
    c, s = math.cos(params.phi0), math.sin(params.phi0)
    z = params.z0 + params.q0 * t - 0.5 * prof.integral(t, "f")
    pos = np.stack([rho * c, rho * s, z], axis=-1)
    if not with_velocity:
        return pos
    drho = df / (2.0 * rho)
    vel = np.stack([drho * c, drho * s, params.q0 - 0.5 * f], axis=-1)
    return pos, vel


def eval_planar_q0_zero(params, t, *, with_velocity=False):
    """Planar curve with p0 = 0, q0 = 0.

    rho^2 = J(t) = 2 sn^2(t + t0) / (2 - sn^2(t + t0)) with modulus 1/sqrt(2),
    and z = z0 - (1/2) integral_0^t J.  The curve stays in |rho| <= sqrt(2).
    """
    prof = _profile(0.0, -2.0, 2.0, 1.0, params.t0)
    return _planar_from_signed(params, prof, t, with_velocity)


def eval_planar_q0_one(params, t, *, with_velocity=False):
    """Planar sech curve for p0 = 0, q0 = 1, defined for all real t.

    rho = 2 / cosh(t - t0),  z = z0 + t - 2 (tanh(t - t0) + tanh t0).
    """
    t = np.asarray(t, dtype=float)
    if params.rho0 > 2.0 + 1e-9:
        raise InconsistentICError(f"planar sech case needs rho0 <= 2, got {params.rho0!r}")
    tau = t - params.t0
    sech = 1.0 / np.cosh(tau)
    th = np.tanh(tau)
    rho = 2.0 * sech
    c, s = math.cos(params.phi0), math.sin(params.phi0)
    pos = np.stack([rho * c, rho * s, params.z0 + t - 2.0 * (th + math.tanh(params.t0))], axis=-1)
    if not with_velocity:
        return pos
    drho = -rho * th
    vel = np.stack([drho * c, drho * s, 1.0 - 2.0 * sech * sech], axis=-1)
    return pos, vel


def eval_planar_general(params, t, *, with_velocity=False):
    """Planar curve for p0 = 0 and q0 in (-1, 1) or q0 > 1.

    q0 in (-1, 1): rho^2 = 2(1 - q0^2) sn^2 / (2 - (q0 + 1) sn^2), sn = sn(t + t0, sqrt((q0+1)/2)).
    q0 > 1:        rho^2 = (q0^2 - 1) / ((q0 + 1)/2 - sn^2),
                   sn = sn(sqrt((q0+1)/2) t + t0, sqrt(2/(q0+1))).
    Height from z' = q0 - rho^2 / 2.
    """
    q0 = params.q0
    if abs(params.p0) > EPS_CLASS or not (-1.0 < q0 < 1.0 or q0 > 1.0):
        raise ContractViolation(f"planar general case needs p0 = 0 and q0 in (-1,1) U (1,inf), "
                                f"got p0={params.p0!r}, q0={q0!r}")
    prof = _profile_for(params)
    if q0 < 1.0:
        return _planar_from_signed(params, prof, t, with_velocity)
    return _planar_from_profile(params, prof, t, with_velocity)


def eval_general_elliptic(params, t, *, with_velocity=False):
    """Non-planar Case-I curve (p0 != 0, positive discriminant, q0 > -1).

    rho^2 by the Mobius-sn formula on [A, B]; phi = phi0 + p0 int_0^t 1/rho^2,
    z = z0 + q0 t - (1/2) int_0^t rho^2.
    """
    prof = _profile_for(params)
    t = np.asarray(t, dtype=float)
    f, df = prof.f_and_rate(t)
    rho = np.sqrt(f)
    phi = params.phi0 + params.p0 * prof.integral(t, "inv")
    z = params.z0 + params.q0 * t - 0.5 * prof.integral(t, "f")
    cphi, sphi = np.cos(phi), np.sin(phi)
    pos = np.stack([rho * cphi, rho * sphi, z], axis=-1)
    if not with_velocity:
        return pos
    drho = df / (2.0 * rho)
    dphi = params.p0 / f
    vel = np.stack([drho * cphi - rho * dphi * sphi,
                    drho * sphi + rho * dphi * cphi,
                    params.q0 - 0.5 * f], axis=-1)
    return pos, vel


def eval_helix_case_ii(params, ic, t, *, with_velocity=False):
    """Constant-radius helix with z' = w0 < 0.

    x = x0 cos(a t) + (u0/a) sin(a t), y likewise, z = z0 + w0 t, a = sqrt(-w0).
    """
    x0, y0, z0 = ic.pos
    u0, v0, w0 = ic.vel
    if not w0 < 0:
        raise ContractViolation(f"a constant-radius magnetic helix needs w0 < 0, got {w0!r}")
    t = np.asarray(t, dtype=float)
    a = math.sqrt(-w0)
    ca, sa = np.cos(a * t), np.sin(a * t)
    pos = np.stack([x0 * ca + u0 / a * sa, y0 * ca + v0 / a * sa, z0 + w0 * t], axis=-1)
    if not with_velocity:
        return pos
    vel = np.stack([-a * x0 * sa + u0 * ca, -a * y0 * sa + v0 * ca, np.full_like(t, w0)], axis=-1)
    return pos, vel


def eval_classical_helix(s, ic, t, *, with_velocity=False):
    """Magnetic curve of the uniform field s d/dz through ``ic``."""
    if s == 0:
        raise ValueError("strength s must be non-zero (s = 0 gives straight lines)")
    x0, y0, z0 = ic.pos
    u0, v0, w0 = ic.vel
    t = np.asarray(t, dtype=float)
    cs, sn = np.cos(s * t), np.sin(s * t)
    pos = np.stack([u0 / s * sn + v0 / s * cs + x0 - v0 / s,
                    -u0 / s * cs + v0 / s * sn + y0 + u0 / s,
                    w0 * t + z0], axis=-1)
    if not with_velocity:
        return pos
    vel = np.stack([u0 * cs - v0 * sn, u0 * sn + v0 * cs, np.full_like(t, w0)], axis=-1)
    return pos, vel


def classical_curvature_torsion(s, w0):
    """(kappa, tau) = (|s| sqrt(1 - w0^2), s w0) for the field s d/dz."""
    if not abs(w0) <= 1.0:
        raise ValueError(f"|w0| must be <= 1, got {w0!r}")
    return abs(s) * math.sqrt((1.0 - w0) * (1.0 + w0)), s * w0


class ClosedFormTrajectory:
    """Closed-form curve through ``ic`` for ``field``, in the original axes.

    Rotational or translation fields about x or y are solved in relabelled
    coordinates with the axis as z and mapped back.
    """

    def __init__(self, field, ic):
        check_unit_speed(ic)
        self.field = field
        self.ic = ic
        self.case = classify(ic, field)
        canon = ic.permuted(field.axis)
        self._canon_ic = canon
        if not self.case.solvable:
            raise NonExistentTrajectory(self.case.reason or
                                        "initial point on the rotation axis has no closed form")
        if self.case.kind == CLASSICAL_FIELD:
            self.params = SolutionParams(case=self.case, s=field.strength, ic=canon)
        else:
            self.params = solve_params(self.case, invariants_from_ic(canon), canon)

    def _canonical_state(self, t):
        p = self.params
        kind = self.case.kind
        if kind == CLASSICAL_FIELD:
            return eval_classical_helix(p.s, self._canon_ic, t, with_velocity=True)
        if kind == HELIX_CASE_II:
            return eval_helix_case_ii(p, self._canon_ic, t, with_velocity=True)
        if kind == PLANAR_SECH:
            return eval_planar_q0_one(p, t, with_velocity=True)
        if kind == PLANAR_BOUNDED and abs(p.q0) <= EPS_CLASS:
            return eval_planar_q0_zero(p, t, with_velocity=True)
        if kind in (PLANAR_BOUNDED, PLANAR_ANNULUS):
            return eval_planar_general(p, t, with_velocity=True)
        return eval_general_elliptic(p, t, with_velocity=True)

    def state(self, t):
        """(positions, velocities), each shaped ``t.shape + (3,)``."""
        pos, vel = self._canonical_state(t)
        axis = self.field.axis
        return from_canonical(pos, axis), from_canonical(vel, axis)

    def position(self, t):
        return self.state(t)[0]

    def velocity(self, t):
        return self.state(t)[1]


def closed_form_trajectory(field, ic):
    """Build the :class:`ClosedFormTrajectory` for ``ic``.

    Raises
    ------
    NonExistentTrajectory
        If the initial data fall in a case without a closed form.
    """
    return ClosedFormTrajectory(field, ic)
