"""Pure-Python reference versions of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two must stay numerically interchangeable; ``tests/test_backend.py``
checks parity.  Inputs are assumed valid: argument checking happens in the
public wrappers (``elliptic``, ``integrate``).
"""

import math

import numpy as np

# Carlson duplication stops once all relative deviations from the mean are
# below this; the truncated series error is then ~ RF_ERRTOL**6 / 4 < 1e-18.
RF_ERRTOL = 1.0e-3
# AGM stops at relative change below this.
AGM_RTOL = 1.0e-16
# Below this value of 1 - k^2 the hyperbolic limit is exact to rounding.
HYPERBOLIC_KC2 = 1.0e-14
_MAX_AGM = 40


def carlson_rf(x, y, z):
    """Carlson's symmetric integral R_F(x, y, z) by duplication."""
    while True:
        mu = (x + y + z) / 3.0
        dx = 1.0 - x / mu
        dy = 1.0 - y / mu
        dz = 1.0 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < RF_ERRTOL:
            break
        sx = math.sqrt(x)
        sy = math.sqrt(y)
        sz = math.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(mu)


def complete_k(k):
    """K(k) = pi / (2 AGM(1, k')); requires 0 <= k < 1."""
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(_MAX_AGM):
        if abs(a - b) <= AGM_RTOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def sncndn(u, k):
    """Return (sn, cn, dn, am) for real u and 0 <= k <= 1.

    Descending Landen transformation seeded by the AGM (Abramowitz & Stegun
    16.4).  The argument is first reduced modulo 2K so the scaled phase
    stays small.
    """
    if k == 0.0:
        return math.sin(u), math.cos(u), 1.0, u
    kc2 = (1.0 - k) * (1.0 + k)
    if kc2 < HYPERBOLIC_KC2:
        if abs(u) > 710.0:
            s = math.copysign(1.0, u)
            return s, 0.0, 0.0, math.copysign(0.5 * math.pi, u)
        ch = math.cosh(u)
        return math.tanh(u), 1.0 / ch, 1.0 / ch, 2.0 * math.atan(math.tanh(0.5 * u))

    a_list = [1.0]
    c_list = [k]
    a = 1.0
    b = math.sqrt(kc2)
    for _ in range(_MAX_AGM):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        a_list.append(a)
        c_list.append(c)
        if abs(c) <= AGM_RTOL * a:
            break
    n = len(a_list) - 1
    two_k = math.pi / a  # 2K
    m = round(u / two_k)
    ur = u - m * two_k

    phi = (2.0 ** n) * a * ur
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(c_list[j] / a_list[j] * math.sin(phi)))
    s = math.sin(phi)
    c = math.cos(phi)
    # dn^2 = k'^2 + k^2 cn^2: no cancellation, unlike cos(phi0)/cos(phi1 - phi0)
    # which is 0/0 at u = K.
    dn = math.sqrt(kc2 + k * k * c * c)
    if m % 2:
        s = -s
        c = -c
    return s, c, dn, phi + m * math.pi


def sncndn_array(u, k):
    """Vectorised wrapper: returns (sn, cn, dn) arrays shaped like ``u``."""
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    sn = np.empty_like(flat)
    cn = np.empty_like(flat)
    dn = np.empty_like(flat)
    for i, ui in enumerate(flat):
        sn[i], cn[i], dn[i], _ = sncndn(float(ui), k)
    return sn.reshape(u.shape), cn.reshape(u.shape), dn.reshape(u.shape)


# Dormand-Prince 5(4) tableau.
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
_D1 = -12715105075 / 11282082432
_D3 = 87487479700 / 32700410799
_D4 = -10690763975 / 1880347072
_D5 = 701980252875 / 199316789632
_D6 = -1453857185 / 822651844
_D7 = 69997945 / 29380423

_UROUND = 2.220446049250313e-16
_SAFE = 0.9
_BETA = 0.04
_EXPO1 = 0.2 - 0.75 * _BETA
_FACC1 = 5.0   # 1 / (min shrink factor 0.2)
_FACC2 = 0.1   # 1 / (max growth factor 10)


def _rhs(om, bv, y):
    x0, x1, x2, v0, v1, v2 = y
    # field value V(p) = omega x p + b
    f0 = om[1] * x2 - om[2] * x1 + bv[0]
    f1 = om[2] * x0 - om[0] * x2 + bv[1]
    f2 = om[0] * x1 - om[1] * x0 + bv[2]
    return (v0, v1, v2,
            f1 * v2 - f2 * v1,
            f2 * v0 - f0 * v2,
            f0 * v1 - f1 * v0)


def _lin(y, h, pairs):
    out = list(y)
    for coef, k in pairs:
        hc = h * coef
        for i in range(6):
            out[i] += hc * k[i]
    return out


def dopri_linear(omega, bvec, y0, times, rtol, atol, max_step, max_steps=1_000_000):
    """Integrate gamma'' = V(gamma) x gamma' with V(p) = omega x p + bvec.

    Parameters
    ----------
    omega, bvec : sequence of 3 floats
    y0 : sequence of 6 floats
        Position followed by velocity at t = times[0] = 0.
    times : 1-D array, non-decreasing, starting at 0
        Output times; the last entry is the integration end point.

    Returns
    -------
    out : ndarray (len(times), 6)
    stats : tuple (status, t_last, naccept, nreject)
        status 0 = success, 1 = step size underflow, 2 = step budget exhausted.
    """
    om = tuple(float(v) for v in omega)
    bv = tuple(float(v) for v in bvec)
    y = [float(v) for v in y0]
    times = np.asarray(times, dtype=float)
    nt = len(times)
    out = np.empty((nt, 6))
    t_end = float(times[-1])
    t = 0.0
    j = 0
    while j < nt and times[j] <= t:
        out[j] = y
        j += 1
    if j == nt:
        return out, (0, t, 0, 0)

    k1 = _rhs(om, bv, y)
    # Hairer's starting step heuristic.
    sk = [atol + rtol * abs(v) for v in y]
    dnf = sum((k1[i] / sk[i]) ** 2 for i in range(6)) / 6
    dny = sum((y[i] / sk[i]) ** 2 for i in range(6)) / 6
    h = 1e-6 if (dnf <= 1e-10 or dny <= 1e-10) else 0.01 * math.sqrt(dny / dnf)
    h = min(h, max_step)
    y1 = [y[i] + h * k1[i] for i in range(6)]
    k2 = _rhs(om, bv, y1)
    der2 = math.sqrt(sum(((k2[i] - k1[i]) / sk[i]) ** 2 for i in range(6)) / 6) / h
    der12 = max(abs(der2), math.sqrt(dnf))
    h1 = max(1e-6, h * 1e-3) if der12 <= 1e-15 else (0.01 / der12) ** 0.2
    h = min(100 * h, h1, max_step, t_end)

    facold = 1e-4
    reject = False
    naccept = nreject = 0
    while True:
        if naccept + nreject >= max_steps:
            return out, (2, t, naccept, nreject)
        if 0.1 * abs(h) <= abs(t) * _UROUND or h <= 0.0:
            return out, (1, t, naccept, nreject)
        last = False
        if t + 1.01 * h >= t_end:
            h = t_end - t
            last = True

        k2 = _rhs(om, bv, _lin(y, h, ((_A21, k1),)))
        k3 = _rhs(om, bv, _lin(y, h, ((_A31, k1), (_A32, k2))))
        k4 = _rhs(om, bv, _lin(y, h, ((_A41, k1), (_A42, k2), (_A43, k3))))
        k5 = _rhs(om, bv, _lin(y, h, ((_A51, k1), (_A52, k2), (_A53, k3), (_A54, k4))))
        ys = _lin(y, h, ((_A61, k1), (_A62, k2), (_A63, k3), (_A64, k4), (_A65, k5)))
        k6 = _rhs(om, bv, ys)
        ynew = _lin(y, h, ((_A71, k1), (_A73, k3), (_A74, k4), (_A75, k5), (_A76, k6)))
        k7 = _rhs(om, bv, ynew)

        err = 0.0
        for i in range(6):
            ei = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                      + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (ei / sc) ** 2
        err = math.sqrt(err / 6)

        fac11 = err ** _EXPO1
        fac = fac11 / facold ** _BETA
        fac = max(_FACC2, min(_FACC1, fac / _SAFE))
        hnew = h / fac

        if err <= 1.0:
            facold = max(err, 1e-4)
            naccept += 1
            tnew = t + h if not last else t_end
            if j < nt and times[j] <= tnew:
                r1 = y
                r2 = [ynew[i] - y[i] for i in range(6)]
                r3 = [h * k1[i] - r2[i] for i in range(6)]
                r4 = [r2[i] - h * k7[i] - r3[i] for i in range(6)]
                r5 = [h * (_D1 * k1[i] + _D3 * k3[i] + _D4 * k4[i]
                           + _D5 * k5[i] + _D6 * k6[i] + _D7 * k7[i]) for i in range(6)]
                while j < nt and times[j] <= tnew:
                    if times[j] == tnew:
                        out[j] = ynew
                    else:
                        th = (times[j] - t) / h
                        th1 = 1.0 - th
                        out[j] = [r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])))
                                  for i in range(6)]
                    j += 1
            y = ynew
            k1 = k7
            t = tnew
            if last or j >= nt:
                return out, (0, t, naccept, nreject)
            hnew = min(hnew, max_step)
            if reject:
                hnew = min(hnew, h)
            reject = False
        else:
            hnew = h / min(_FACC1, fac11 / _SAFE)
            reject = True
            nreject += 1
        h = hnew
