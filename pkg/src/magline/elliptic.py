"""Real-argument elliptic integral of the first kind and Jacobi functions.

F(phi, k) is computed through Carlson's R_F, sn/cn/dn through the AGM-seeded
descending Landen recursion.  The modulus convention is ``k`` (not the
parameter m = k**2).
"""

import math
from dataclasses import dataclass

from . import _backend
from .errors import EllipticDivergenceError, EllipticDomainError


@dataclass(frozen=True)
class EllipticEval:
    """Jacobi functions at one argument."""

    u: float
    k: float
    sn: float
    cn: float
    dn: float
    am: float


def _check_modulus(k, *, allow_one=True):
    if not math.isfinite(k) or k < 0.0 or k > 1.0 or (k == 1.0 and not allow_one):
        raise EllipticDomainError(f"modulus k={k!r} outside [0, 1{']' if allow_one else ')'}")


def complete_elliptic_k(k):
    """Complete integral K(k) for 0 <= k < 1."""
    _check_modulus(k, allow_one=False)
    return _backend.complete_k(float(k))


def incomplete_elliptic_f(phi, k):
    """F(phi, k) = integral_0^phi dtheta / sqrt(1 - k^2 sin^2 theta).

    Any real ``phi`` is accepted through F(phi + n pi) = F(phi) + 2 n K.
    ``k = 1`` is accepted only for |phi| < pi/2, where F = artanh(sin phi).

    Raises
    ------
    EllipticDomainError
        If ``k`` lies outside [0, 1].
    EllipticDivergenceError
        If ``k = 1`` and |phi| >= pi/2.
    """
    _check_modulus(k)
    phi = float(phi)
    if k == 1.0:
        if abs(phi) >= 0.5 * math.pi:
            raise EllipticDivergenceError(f"F(phi, 1) diverges at |phi|={abs(phi)!r} >= pi/2")
        return math.atanh(math.sin(phi))
    n = round(phi / math.pi)
    phr = phi - n * math.pi
    s = math.sin(phr)
    c = math.cos(phr)
    # 1 - k|s| written without cancellation for k and |s| near 1
    ks_lo = (1.0 - k) + k * c * c / (1.0 + abs(s))
    val = s * _backend.carlson_rf(c * c, ks_lo * (1.0 + k * abs(s)), 1.0)
    if n:
        val += 2 * n * _backend.complete_k(float(k))
    return val


def jacobi_sn_cn_dn(u, k):
    """Jacobi sn, cn, dn and amplitude am at real ``u`` for 0 <= k <= 1."""
    _check_modulus(k)
    sn, cn, dn, am = _backend.sncndn(float(u), float(k))
    return EllipticEval(float(u), float(k), sn, cn, dn, am)


def sncndn(u, k):
    """Array version of :func:`jacobi_sn_cn_dn`; returns (sn, cn, dn)."""
    _check_modulus(k)
    return _backend.sncndn_array(u, float(k))


def inverse_sn(y, k, cn=None):
    """u in [-K, K] with sn(u, k) = y; equals F(arcsin y, k).

    If the caller knows ``cn = sqrt(1 - y^2) >= 0`` more accurately than
    ``1 - y**2`` would give it (near |y| = 1), passing it keeps u well
    conditioned: the amplitude is then atan2(y, cn).

    Raises
    ------
    EllipticDomainError
        If |y| > 1 or ``k`` outside [0, 1).
    """
    _check_modulus(k, allow_one=False)
    if not abs(y) <= 1.0:
        raise EllipticDomainError(f"inverse_sn needs |y| <= 1, got {y!r}")
    if cn is None:
        return incomplete_elliptic_f(math.asin(y), k)
    if not cn >= 0.0:
        raise EllipticDomainError(f"cn must be >= 0, got {cn!r}")
    return incomplete_elliptic_f(math.atan2(y, cn), k)
