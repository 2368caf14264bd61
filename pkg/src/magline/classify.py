"""Invariants, the radial cubic, and the trajectory taxonomy.

For the rotational field about z, a unit-speed curve has the two prime
integrals p0 = x v - u y and q0 = (x^2 + y^2)/2 + w, and f = rho^2 obeys

    f'^2 + P(f) = 0,    P(f) = f^3 - 4 q0 f^2 + 4 (q0^2 - 1) f + 4 p0^2.

The sign of the discriminant of P and the signs of its roots decide which
kind of curve (if any) the initial data produce.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ContractViolation
from .fields import KillingField
from .integrate import check_unit_speed

EPS_CLASS = 1e-9
EPS_AXIS = 1e-12

PLANAR_BOUNDED = "planar-bounded"
PLANAR_SECH = "planar-sech"
PLANAR_ANNULUS = "planar-annulus"
GENERAL_ELLIPTIC = "general-elliptic"
HELIX_CASE_II = "helix-case-ii"
CLASSICAL_FIELD = "classical-field"
NON_EXISTENT = "non-existent"
AXIS_DEGENERATE = "axis-degenerate"

CASE_KINDS = (PLANAR_BOUNDED, PLANAR_SECH, PLANAR_ANNULUS, GENERAL_ELLIPTIC,
              HELIX_CASE_II, CLASSICAL_FIELD, NON_EXISTENT, AXIS_DEGENERATE)
SOLVABLE = frozenset({PLANAR_BOUNDED, PLANAR_SECH, PLANAR_ANNULUS, GENERAL_ELLIPTIC,
                      HELIX_CASE_II, CLASSICAL_FIELD})

REASON_ALL_NEGATIVE = "all-roots-negative"
REASON_DISCRIMINANT = "non-positive-discriminant"
REASON_Q0_RANGE = "q0-not-above-minus-one"


@dataclass(frozen=True)
class CaseTag:
    """One entry of the taxonomy.  ``str(tag)`` is the stable CLI name."""

    kind: str
    q0: Optional[float] = None
    roots: Optional[tuple] = None      # (A, B, C) for general-elliptic
    eps: Optional[int] = None          # helix orientation for helix-case-ii
    strength: Optional[float] = None   # s for classical-field
    reason: Optional[str] = None       # for non-existent

    def __post_init__(self):
        if self.kind not in CASE_KINDS:
            raise ValueError(f"unknown case kind {self.kind!r}")

    def __str__(self):
        return self.kind

    @property
    def solvable(self):
        return self.kind in SOLVABLE

    def to_dict(self):
        out = {"kind": self.kind}
        for name in ("q0", "roots", "eps", "strength", "reason"):
            val = getattr(self, name)
            if val is not None:
                out[name] = list(val) if name == "roots" else val
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "roots" in data:
            data["roots"] = tuple(data["roots"])
        return cls(**data)


@dataclass(frozen=True)
class InitialInvariants:
    p0: float
    q0: float
    rho0: float
    phi0: float = 0.0
    z0: float = 0.0


def invariants_from_ic(ic):
    """p0, q0, rho0, phi0, z0 of a unit-speed initial state (axis z)."""
    check_unit_speed(ic)
    x0, y0, z0 = ic.pos
    u0, v0, w0 = ic.vel
    rho0 = math.hypot(x0, y0)
    phi0 = math.atan2(y0, x0) if rho0 > 0 else 0.0
    return InitialInvariants(p0=x0 * v0 - u0 * y0, q0=0.5 * (x0 * x0 + y0 * y0) + w0,
                             rho0=rho0, phi0=phi0, z0=z0)


@dataclass(frozen=True)
class CubicProfile:
    coeffs: tuple          # (1, -4 q0, 4 (q0^2 - 1), 4 p0^2), highest degree first
    delta: float
    real_roots: tuple      # ascending
    p0: float = 0.0
    q0: float = 0.0
    root_interval: Optional[tuple] = field(default=None)

    def __call__(self, f):
        _, a, b, c = self.coeffs
        return ((f + a) * f + b) * f + c


def discriminant(p0, q0):
    """-16 [27 p0^4 + 8 p0^2 q0 (q0^2 - 9) - 16 (q0^2 - 1)^2]."""
    p2 = p0 * p0
    return -16.0 * (27.0 * p2 * p2 + 8.0 * p2 * q0 * (q0 * q0 - 9.0)
                    - 16.0 * (q0 * q0 - 1.0) ** 2)


def _newton_polish(coeffs, r):
    _, a, b, c = coeffs
    val = ((r + a) * r + b) * r + c
    der = (3.0 * r + 2.0 * a) * r + b
    if der != 0.0 and math.isfinite(val / der):
        step = val / der
        if abs(step) <= 1e-6 * max(1.0, abs(r)):
            return r - step
    return r


def _cubic_roots(coeffs, delta):
    _, a, b, c = coeffs
    shift = -a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    if delta > 0 and p < 0:
        # three distinct real roots: trigonometric form, p < 0 here
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)))
        theta = math.acos(arg) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * j / 3.0) + shift for j in range(3)]
    elif delta < 0:
        if p < 0:
            arg = -3.0 * abs(q) / (2.0 * p) * math.sqrt(-3.0 / p)
            t = -2.0 * math.copysign(1.0, q) * math.sqrt(-p / 3.0) * math.cosh(
                math.acosh(max(1.0, arg)) / 3.0)
        elif p > 0:
            arg = 3.0 * q / (2.0 * p) * math.sqrt(3.0 / p)
            t = -2.0 * math.sqrt(p / 3.0) * math.sinh(math.asinh(arg) / 3.0)
        else:
            t = -math.copysign(abs(q) ** (1.0 / 3.0), q)
        roots = [t + shift]
    else:
        if p == 0.0:
            roots = [shift]
        else:
            roots = sorted({3.0 * q / p + shift, -1.5 * q / p + shift})
    return tuple(sorted(_newton_polish(coeffs, r) for r in roots))


def cubic_profile(inv):
    """Coefficients, discriminant and real roots of P for the given invariants."""
    p0, q0 = inv.p0, inv.q0
    coeffs = (1.0, -4.0 * q0, 4.0 * (q0 * q0 - 1.0), 4.0 * p0 * p0)
    delta = discriminant(p0, q0)
    roots = _cubic_roots(coeffs, delta)
    prof = CubicProfile(coeffs, delta, roots, p0, q0)
    interval = admissible_interval(prof) if delta > 0 else None
    return CubicProfile(coeffs, delta, roots, p0, q0, interval)


def admissible_interval(profile):
    """Range (A, B) of f = rho^2 swept by the motion, or None.

    For p0 = 0 the roots are 2(q0 - 1), 0, 2(q0 + 1) and the range is the
    part of [0, 2(q0 + 1)] above the non-zero lower root.  Otherwise the
    motion lives between the two positive roots when there are two.

    Raises
    ------
    ContractViolation
        If the discriminant is not positive.
    """
    if not profile.delta > 0:
        raise ContractViolation(f"admissible_interval needs delta > 0, got {profile.delta!r}")
    lo, mid, hi = profile.real_roots
    if abs(profile.p0) <= EPS_CLASS:
        if profile.q0 <= -1.0:
            return None
        return (max(0.0, 2.0 * (profile.q0 - 1.0)), 2.0 * (profile.q0 + 1.0))
    if lo < 0.0 < mid:
        return (mid, hi)
    return None


def _is_case_ii(ic, inv):
    w_star = -2.0 / (inv.rho0 ** 2 + math.sqrt(inv.rho0 ** 4 + 4.0))
    u0, v0, w0 = ic.vel
    if abs(w0 - w_star) > EPS_CLASS:
        return None
    amp = inv.rho0 * math.sqrt(-w_star)
    for eps in (1, -1):
        if (abs(u0 - eps * amp * math.sin(inv.phi0)) <= EPS_CLASS
                and abs(v0 + eps * amp * math.cos(inv.phi0)) <= EPS_CLASS):
            return eps
    return None


def classify_invariants(inv):
    """Case-I decision from (p0, q0) alone (axis z, rho0 > 0 assumed).

    Accepts pairs that no unit-speed initial state can produce (q0 <= -1,
    or a non-positive discriminant with p0 != 0); those map to NonExistent.
    """
    p0, q0 = inv.p0, inv.q0
    if abs(p0) <= EPS_CLASS:
        if q0 <= -1.0:
            return CaseTag(NON_EXISTENT, q0=q0, reason=REASON_Q0_RANGE)
        if abs(q0 - 1.0) <= EPS_CLASS:
            return CaseTag(PLANAR_SECH, q0=q0)
        if q0 < 1.0:
            return CaseTag(PLANAR_BOUNDED, q0=q0)
        return CaseTag(PLANAR_ANNULUS, q0=q0)
    prof = cubic_profile(inv)
    if not prof.delta > 0:
        return CaseTag(NON_EXISTENT, q0=q0, reason=REASON_DISCRIMINANT)
    if q0 > -1.0 and prof.root_interval is not None:
        a, b = prof.root_interval
        return CaseTag(GENERAL_ELLIPTIC, q0=q0, roots=(a, b, prof.real_roots[0]))
    return CaseTag(NON_EXISTENT, q0=q0, reason=REASON_ALL_NEGATIVE)


def classify(ic, field=KillingField.rotation("z")):
    """Assign a unit-speed initial state to the trajectory taxonomy.

    Rotational fields about x or y are handled by relabelling coordinates
    so the axis becomes z.  Translation fields always give the classical
    helix family.
    """
    check_unit_speed(ic)
    if not field.is_rotation:
        return CaseTag(CLASSICAL_FIELD, strength=field.strength)
    ic = ic.permuted(field.axis)
    inv = invariants_from_ic(ic)
    if inv.rho0 < EPS_AXIS:
        return CaseTag(AXIS_DEGENERATE, q0=inv.q0)
    eps = _is_case_ii(ic, inv)
    if eps is not None:
        return CaseTag(HELIX_CASE_II, q0=inv.q0, eps=eps)
    return classify_invariants(inv)


def ic_from_invariants(p0, q0, rho0=1.0, *, inward=False):
    """Unit-speed state at (rho0, 0, 0) carrying the given invariants.

    Raises
    ------
    InconsistentICError
        If no unit velocity at radius ``rho0`` produces (p0, q0).
    """
    from .fields import State6
    from .errors import InconsistentICError

    if not rho0 > 0:
        raise InconsistentICError(f"rho0 must be positive, got {rho0!r}")
    v0 = p0 / rho0
    w0 = q0 - 0.5 * rho0 * rho0
    rest = 1.0 - v0 * v0 - w0 * w0
    if rest < -1e-12:
        raise InconsistentICError(
            f"(p0, q0)=({p0!r}, {q0!r}) is not reachable by a unit-speed state at rho0={rho0!r}")
    u0 = math.sqrt(max(rest, 0.0))
    return State6((rho0, 0.0, 0.0), (-u0 if inward else u0, v0, w0))
