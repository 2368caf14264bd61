# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``.

Same signatures, same algorithms, same constants.  Keep the two in step.
"""

from libc.math cimport sqrt, sin, cos, asin, atan, tanh, cosh, fabs, fmax, fmin, pow, round, copysign, M_PI

import numpy as np

DEF MAX_AGM = 40

cdef double RF_ERRTOL = 1.0e-3
cdef double AGM_RTOL = 1.0e-16
cdef double HYPERBOLIC_KC2 = 1.0e-14


cpdef double carlson_rf(double x, double y, double z):
    cdef double mu, dx, dy, dz, sx, sy, sz, lam, e2, e3
    while True:
        mu = (x + y + z) / 3.0
        dx = 1.0 - x / mu
        dy = 1.0 - y / mu
        dz = 1.0 - z / mu
        if fmax(fabs(dx), fmax(fabs(dy), fabs(dz))) < RF_ERRTOL:
            break
        sx = sqrt(x)
        sy = sqrt(y)
        sz = sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / sqrt(mu)


cpdef double complete_k(double k):
    cdef double a = 1.0, b = sqrt((1.0 - k) * (1.0 + k)), an
    cdef int i
    for i in range(MAX_AGM):
        if fabs(a - b) <= AGM_RTOL * a:
            break
        an = 0.5 * (a + b)
        b = sqrt(a * b)
        a = an
    return M_PI / (a + b)


cdef void _sncndn(double u, double k, double* out) nogil:
    cdef double kc2, ch, a, b, c, an, two_k, ur, phi, s, cc
    cdef double a_list[MAX_AGM + 1]
    cdef double c_list[MAX_AGM + 1]
    cdef int n, j
    cdef double m
    if k == 0.0:
        out[0] = sin(u); out[1] = cos(u); out[2] = 1.0; out[3] = u
        return
    kc2 = (1.0 - k) * (1.0 + k)
    if kc2 < HYPERBOLIC_KC2:
        if fabs(u) > 710.0:
            out[0] = copysign(1.0, u); out[1] = 0.0; out[2] = 0.0
            out[3] = copysign(0.5 * M_PI, u)
            return
        ch = cosh(u)
        out[0] = tanh(u); out[1] = 1.0 / ch; out[2] = 1.0 / ch
        out[3] = 2.0 * atan(tanh(0.5 * u))
        return
    a_list[0] = 1.0
    c_list[0] = k
    a = 1.0
    b = sqrt(kc2)
    n = 0
    for j in range(MAX_AGM):
        c = 0.5 * (a - b)
        an = 0.5 * (a + b)
        b = sqrt(a * b)
        a = an
        n += 1
        a_list[n] = a
        c_list[n] = c
        if fabs(c) <= AGM_RTOL * a:
            break
    two_k = M_PI / a
    # Python's round() is half-to-even; the tie case only flips which of two
    # equivalent reductions is used.
    m = round(u / two_k)
    ur = u - m * two_k
    phi = pow(2.0, n) * a * ur
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + asin(c_list[j] / a_list[j] * sin(phi)))
    s = sin(phi)
    cc = cos(phi)
    out[2] = sqrt(kc2 + k * k * cc * cc)
    if (<long> m) % 2 != 0:
        s = -s
        cc = -cc
    out[0] = s
    out[1] = cc
    out[3] = phi + m * M_PI


def sncndn(double u, double k):
    cdef double out[4]
    _sncndn(u, k, out)
    return out[0], out[1], out[2], out[3]


def sncndn_array(u, double k):
    cdef double[::1] flat = np.ascontiguousarray(u, dtype=float).ravel()
    shape = np.shape(u)
    cdef Py_ssize_t n = flat.shape[0], i
    sn = np.empty(n)
    cn = np.empty(n)
    dn = np.empty(n)
    cdef double[::1] vs = sn, vc = cn, vd = dn
    cdef double out[4]
    with nogil:
        for i in range(n):
            _sncndn(flat[i], k, out)
            vs[i] = out[0]
            vc[i] = out[1]
            vd[i] = out[2]
    return sn.reshape(shape), cn.reshape(shape), dn.reshape(shape)


# Dormand-Prince 5(4) tableau.
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double D1 = -12715105075.0 / 11282082432
cdef double D3 = 87487479700.0 / 32700410799
cdef double D4 = -10690763975.0 / 1880347072
cdef double D5 = 701980252875.0 / 199316789632
cdef double D6 = -1453857185.0 / 822651844
cdef double D7 = 69997945.0 / 29380423

cdef double UROUND = 2.220446049250313e-16
cdef double SAFE = 0.9
cdef double BETA = 0.04
cdef double EXPO1 = 0.2 - 0.75 * 0.04
cdef double FACC1 = 5.0
cdef double FACC2 = 0.1


cdef inline void _rhs(const double* om, const double* bv, const double* y, double* dy) nogil:
    cdef double f0 = om[1] * y[2] - om[2] * y[1] + bv[0]
    cdef double f1 = om[2] * y[0] - om[0] * y[2] + bv[1]
    cdef double f2 = om[0] * y[1] - om[1] * y[0] + bv[2]
    dy[0] = y[3]
    dy[1] = y[4]
    dy[2] = y[5]
    dy[3] = f1 * y[5] - f2 * y[4]
    dy[4] = f2 * y[3] - f0 * y[5]
    dy[5] = f0 * y[4] - f1 * y[3]


def dopri_linear(omega, bvec, y0, times, double rtol, double atol, double max_step,
                 long max_steps=1000000):
    cdef double om[3]
    cdef double bv[3]
    cdef double y[6]
    cdef double ynew[6]
    cdef double yt[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double k7[6]
    cdef double r2[6]
    cdef double r3[6]
    cdef double r4[6]
    cdef double r5[6]
    cdef double sk[6]
    cdef int i
    for i in range(3):
        om[i] = omega[i]
        bv[i] = bvec[i]
    for i in range(6):
        y[i] = y0[i]
    cdef double[::1] tv = np.ascontiguousarray(times, dtype=float)
    cdef Py_ssize_t nt = tv.shape[0], j = 0
    res = np.empty((nt, 6))
    cdef double[:, ::1] out = res
    cdef double t_end = tv[nt - 1], t = 0.0, h, h1, dnf, dny, der2, der12
    cdef double err, ei, sc, fac11, fac, hnew, facold, tnew, th, th1
    cdef bint reject = False, last
    cdef long naccept = 0, nreject = 0
    cdef int status = 0

    while j < nt and tv[j] <= t:
        for i in range(6):
            out[j, i] = y[i]
        j += 1
    if j == nt:
        return res, (0, t, 0, 0)

    with nogil:
        _rhs(om, bv, y, k1)
        dnf = 0.0
        dny = 0.0
        for i in range(6):
            sk[i] = atol + rtol * fabs(y[i])
            dnf += (k1[i] / sk[i]) * (k1[i] / sk[i])
            dny += (y[i] / sk[i]) * (y[i] / sk[i])
        dnf /= 6
        dny /= 6
        if dnf <= 1e-10 or dny <= 1e-10:
            h = 1e-6
        else:
            h = 0.01 * sqrt(dny / dnf)
        h = fmin(h, max_step)
        for i in range(6):
            yt[i] = y[i] + h * k1[i]
        _rhs(om, bv, yt, k2)
        der2 = 0.0
        for i in range(6):
            der2 += ((k2[i] - k1[i]) / sk[i]) * ((k2[i] - k1[i]) / sk[i])
        der2 = sqrt(der2 / 6) / h
        der12 = fmax(fabs(der2), sqrt(dnf))
        if der12 <= 1e-15:
            h1 = fmax(1e-6, h * 1e-3)
        else:
            h1 = pow(0.01 / der12, 0.2)
        h = fmin(fmin(100 * h, h1), fmin(max_step, t_end))

        facold = 1e-4
        while True:
            if naccept + nreject >= max_steps:
                status = 2
                break
            if 0.1 * fabs(h) <= fabs(t) * UROUND or h <= 0.0:
                status = 1
                break
            last = False
            if t + 1.01 * h >= t_end:
                h = t_end - t
                last = True

            for i in range(6):
                yt[i] = y[i] + h * A21 * k1[i]
            _rhs(om, bv, yt, k2)
            for i in range(6):
                yt[i] = y[i] + h * A31 * k1[i] + h * A32 * k2[i]
            _rhs(om, bv, yt, k3)
            for i in range(6):
                yt[i] = y[i] + h * A41 * k1[i] + h * A42 * k2[i] + h * A43 * k3[i]
            _rhs(om, bv, yt, k4)
            for i in range(6):
                yt[i] = (y[i] + h * A51 * k1[i] + h * A52 * k2[i] + h * A53 * k3[i]
                         + h * A54 * k4[i])
            _rhs(om, bv, yt, k5)
            for i in range(6):
                yt[i] = (y[i] + h * A61 * k1[i] + h * A62 * k2[i] + h * A63 * k3[i]
                         + h * A64 * k4[i] + h * A65 * k5[i])
            _rhs(om, bv, yt, k6)
            for i in range(6):
                ynew[i] = (y[i] + h * A71 * k1[i] + h * A73 * k3[i] + h * A74 * k4[i]
                           + h * A75 * k5[i] + h * A76 * k6[i])
            _rhs(om, bv, ynew, k7)

            err = 0.0
            for i in range(6):
                ei = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i]
                          + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                sc = atol + rtol * fmax(fabs(y[i]), fabs(ynew[i]))
                err += (ei / sc) * (ei / sc)
            err = sqrt(err / 6)

            fac11 = pow(err, EXPO1)
            fac = fac11 / pow(facold, BETA)
            fac = fmax(FACC2, fmin(FACC1, fac / SAFE))
            hnew = h / fac

            if err <= 1.0:
                facold = fmax(err, 1e-4)
                naccept += 1
                tnew = t_end if last else t + h
                if j < nt and tv[j] <= tnew:
                    for i in range(6):
                        r2[i] = ynew[i] - y[i]
                        r3[i] = h * k1[i] - r2[i]
                        r4[i] = r2[i] - h * k7[i] - r3[i]
                        r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i]
                                     + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                    while j < nt and tv[j] <= tnew:
                        if tv[j] == tnew:
                            for i in range(6):
                                out[j, i] = ynew[i]
                        else:
                            th = (tv[j] - t) / h
                            th1 = 1.0 - th
                            for i in range(6):
                                out[j, i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])))
                        j += 1
                for i in range(6):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                t = tnew
                if last or j >= nt:
                    status = 0
                    break
                hnew = fmin(hnew, max_step)
                if reject:
                    hnew = fmin(hnew, h)
                reject = False
            else:
                hnew = h / fmin(FACC1, fac11 / SAFE)
                reject = True
                nreject += 1
            h = hnew
    return res, (status, t, naccept, nreject)
