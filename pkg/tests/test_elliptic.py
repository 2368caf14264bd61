import math

import numpy as np
import pytest
import mpmath
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint
from scipy import special

from magline.elliptic import (complete_elliptic_k, incomplete_elliptic_f, inverse_sn,
                              jacobi_sn_cn_dn, sncndn)
from magline.errors import EllipticDivergenceError, EllipticDomainError

KS = [0.0, 0.1, 0.3, 0.5, 1 / math.sqrt(2), 0.9, 0.99, 0.999999]


def mp_f(phi, k):
    # high precision with the exact k^2 of the binary k (scipy takes m = fl(k^2))
    with mpmath.workdps(30):
        return float(mpmath.ellipf(mpmath.mpf(phi), mpmath.mpf(k) ** 2))


def agm_k(k):
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(40):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2 * a)


@pytest.mark.parametrize("k", KS)
def test_complete_k_matches_agm_and_scipy(k):
    val = complete_elliptic_k(k)
    assert val == pytest.approx(agm_k(k), rel=1e-14)
    assert val == pytest.approx(mp_f(math.pi / 2, k), rel=1e-14)
    assert val == pytest.approx(special.ellipk(k * k), rel=1e-9)


def test_complete_k_known_values():
    assert complete_elliptic_k(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert complete_elliptic_k(1 / math.sqrt(2)) == pytest.approx(1.8540746773013719, rel=1e-15)


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("phi", [-7.0, -1.2, 0.0, 0.4, 1.5707963, 2.9, 10.0])
def test_incomplete_f_matches_oracles(k, phi):
    val = incomplete_elliptic_f(phi, k)
    assert val == pytest.approx(mp_f(phi, k), rel=2e-15, abs=1e-15)
    assert val == pytest.approx(special.ellipkinc(phi, k * k), rel=1e-9, abs=1e-15)


def test_incomplete_f_quasi_periodic():
    k = 0.6
    for n in (-2, 1, 3):
        assert incomplete_elliptic_f(0.3 + n * math.pi, k) == pytest.approx(
            incomplete_elliptic_f(0.3, k) + 2 * n * complete_elliptic_k(k), rel=1e-14)


def test_incomplete_f_at_k_one():
    assert incomplete_elliptic_f(0.7, 1.0) == pytest.approx(math.atanh(math.sin(0.7)), rel=1e-15)
    with pytest.raises(EllipticDivergenceError):
        incomplete_elliptic_f(math.pi / 2, 1.0)


@pytest.mark.parametrize("bad", [-0.1, 1.1, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(EllipticDomainError):
        incomplete_elliptic_f(0.3, bad)
    with pytest.raises(EllipticDomainError):
        jacobi_sn_cn_dn(0.3, bad)
    with pytest.raises(EllipticDomainError):
        sncndn(np.array([0.3]), bad)


def test_complete_k_rejects_one():
    with pytest.raises(EllipticDomainError):
        complete_elliptic_k(1.0)


@pytest.mark.parametrize("k", KS + [1.0])
def test_sncndn_matches_scipy(k):
    u = np.linspace(-12, 12, 2001)
    sn, cn, dn = sncndn(u, k)
    ssn, scn, sdn, _ = special.ellipj(u, k * k)
    assert np.abs(sn - ssn).max() < 1e-12
    assert np.abs(cn - scn).max() < 1e-12
    assert np.abs(dn - sdn).max() < 1e-12


def test_scalar_and_array_agree():
    u = np.array([-3.3, 0.0, 0.2, 5.5])
    sn, cn, dn = sncndn(u, 0.8)
    for i, ui in enumerate(u):
        e = jacobi_sn_cn_dn(ui, 0.8)
        assert (e.sn, e.cn, e.dn) == pytest.approx((sn[i], cn[i], dn[i]), abs=1e-15)


def test_amplitude_inverts_f():
    k = 0.75
    for phi in (-2.0, 0.3, 1.2, 4.0):
        e = jacobi_sn_cn_dn(incomplete_elliptic_f(phi, k), k)
        assert e.am == pytest.approx(phi, abs=1e-13)


def test_quarter_period_values():
    k = 0.6
    e = jacobi_sn_cn_dn(complete_elliptic_k(k), k)
    assert e.sn == pytest.approx(1.0, abs=1e-15)
    assert e.cn == pytest.approx(0.0, abs=1e-15)
    assert e.dn == pytest.approx(math.sqrt(1 - k * k), abs=1e-15)


def test_inverse_sn_quadrature_oracle():
    k = 0.3
    want, _ = sint.quad(lambda x: 1 / math.sqrt((1 - x * x) * (1 - k * k * x * x)), 0, 0.5,
                        epsabs=1e-14, epsrel=1e-14)
    assert inverse_sn(0.5, k) == pytest.approx(want, rel=1e-14)


def test_inverse_sn_with_cn_near_one():
    k = 0.5
    y = 1 - 1e-12
    cn = math.sqrt((1 - y) * (1 + y))
    u = inverse_sn(y, k, cn=cn)
    assert jacobi_sn_cn_dn(u, k).cn == pytest.approx(cn, rel=1e-6)
    with pytest.raises(EllipticDomainError):
        inverse_sn(1.01, k)
    with pytest.raises(EllipticDomainError):
        inverse_sn(0.5, k, cn=-0.1)


@settings(max_examples=200, deadline=None)
@given(y=st.floats(-1, 1), k=st.floats(0, 0.999))
def test_inverse_sn_round_trip(y, k):
    assert jacobi_sn_cn_dn(inverse_sn(y, k), k).sn == pytest.approx(y, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-50, 50), k=st.floats(0, 0.99))
def test_period_and_identities(u, k):
    kk = complete_elliptic_k(k)
    a = jacobi_sn_cn_dn(u, k)
    b = jacobi_sn_cn_dn(u + 4 * kk, k)
    assert b.sn == pytest.approx(a.sn, abs=1e-10)
    assert b.cn == pytest.approx(a.cn, abs=1e-10)
    assert a.sn ** 2 + a.cn ** 2 == pytest.approx(1.0, abs=1e-14)
    assert a.dn ** 2 + k * k * a.sn ** 2 == pytest.approx(1.0, abs=1e-14)
    # sn is odd, cn and dn are even
    c = jacobi_sn_cn_dn(-u, k)
    assert (c.sn, c.cn, c.dn) == pytest.approx((-a.sn, a.cn, a.dn), abs=1e-14)
