"""Coefficient algebra against an independent 50-digit re-evaluation.

The reference functions below transcribe the coefficient expressions
verbatim (bracket by bracket, cancellation and all) in mpmath; the package
implementation uses numerically stable regroupings, so agreement here
checks both the transcription and the regrouping at once.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from microlaser import MicrolaserParams, from_dimensionless
from microlaser.coefficients import (
    coeff_A,
    coeff_F,
    coeff_X,
    coeff_Y,
    coeff_Z,
    fraction_arrays,
    fraction_terms,
)

mp.mp.dps = 50

REF = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.17)


def ref_F(i, n, p):
    n = mp.mpf(n)
    g, kappa, gamma, tau = (mp.mpf(repr(x)) for x in (p.g, p.kappa, p.gamma, p.tau))
    sign = 1 if i == 1 else -1
    m = n + 2 if i == 1 else n + 1
    s = mp.sin(2 * g * mp.sqrt(m) * tau)
    c = mp.cos(2 * g * mp.sqrt(m) * tau)
    rlo, rhi = mp.sqrt(n + 1), mp.sqrt(n + 2)
    diff, tot, cross = rhi - rlo, rhi + rlo, 2 * rlo * rhi
    first = (gamma / kappa) * diff * s - (gamma / g) * c \
        - (2 * n + 3 + cross) * diff * s
    second = sign * (gamma / kappa) * tot * s - (gamma / g) * c \
        - sign * (2 * n + 3 - cross) * tot * s
    return (kappa / (4 * g)) * (first / diff**2 + second / tot**2)


def ref_X(n, p):
    n = mp.mpf(n)
    g, kappa, gamma, R, tau = (mp.mpf(repr(x))
                               for x in (p.g, p.kappa, p.gamma, p.R, p.tau))
    return R * mp.sin(g * mp.sqrt(n) * tau)**2 \
        * mp.exp(-(gamma + (2 * n - 1) * kappa) * tau)


def ref_Y(n, p):
    n = mp.mpf(n)
    g, kappa, gamma, R, tau = (mp.mpf(repr(x))
                               for x in (p.g, p.kappa, p.gamma, p.R, p.tau))
    c = mp.cos(g * mp.sqrt(n + 1) * tau)
    half = (gamma / kappa + 2 * n + 1) / 2
    e_up = mp.exp(-(gamma + (2 * n + 1) * kappa) * tau)
    e_dn = mp.exp(-(gamma + (2 * n - 1) * kappa) * tau)
    return R / 2 * ((2 * c**2 - half + ref_F(1, n - 1, p)) * e_up
                    + (half - ref_F(2, n - 1, p)) * e_dn)


def ref_Z(n, p):
    n = mp.mpf(n)
    kappa, gamma, R, tau = (mp.mpf(repr(x))
                            for x in (p.kappa, p.gamma, p.R, p.tau))
    half = (gamma / kappa + 2 * n + 3) / 2
    e_up = mp.exp(-(gamma + (2 * n + 1) * kappa) * tau)
    e_dn = mp.exp(-(gamma + (2 * n + 3) * kappa) * tau)
    return R / 2 * ((half + ref_F(2, n, p)) * e_up
                    - (half + ref_F(1, n, p)) * e_dn)


def rel_err(value, reference):
    return float(abs(mp.mpf(repr(float(value))) - reference) / abs(reference))


# ---------------------------------------------------------------------------
# A_n


def test_A_examples():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.5)
    assert coeff_A(0, p) == 0.0
    assert coeff_A(5, p) == pytest.approx(0.01, rel=1e-15)
    ns = np.arange(0, 50)
    steps = coeff_A(ns + 1, p) - coeff_A(ns, p)
    assert np.allclose(steps, 2 * p.kappa, rtol=1e-14)


# ---------------------------------------------------------------------------
# X_n


def test_X_zero_flight_time():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.0)
    assert np.all(coeff_X(np.arange(1, 40), p) == 0.0)


def test_X_trapping_zero():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=math.pi)
    assert abs(coeff_X(1, p)) < 1e-30  # sin(pi) at double precision


def test_X_high_precision_value():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.5)
    # frozen from the mpmath transcription at 50 digits
    assert float(coeff_X(4, p)) == pytest.approx(0.1342373999696778011, rel=1e-13)
    assert rel_err(coeff_X(4, p), ref_X(4, p)) < 1e-13


def test_X_bounds_and_positivity():
    for tau in (0.0, 0.17, 0.7, 2.0, 3.5):
        p = MicrolaserParams(g=1.0, kappa=0.003, gamma=0.07, R=0.3, tau=tau)
        x = coeff_X(np.arange(1, 200), p)
        assert np.all(x >= 0.0)
        assert np.all(x <= p.R)


# ---------------------------------------------------------------------------
# F_i


def test_F_kappa_zero_convention():
    # outside the valid domain (kappa > 0); fixed to 0 by the prefactor rule
    p = MicrolaserParams(g=1.0, kappa=0.0, gamma=0.1, R=0.2, tau=0.7)
    assert coeff_F(1, 3, p) == 0.0
    assert coeff_F(2, 0, p) == 0.0


def test_F_zero_flight_time_closed_form():
    p = MicrolaserParams(g=1.0, kappa=0.002, gamma=0.13, R=0.2, tau=0.0)
    for i in (1, 2):
        for n in (-1, 0, 1, 5, 17):
            rlo, rhi = math.sqrt(n + 1), math.sqrt(n + 2)
            expected = -(p.kappa / (4 * p.g)) * (p.gamma / p.g) * (
                (rhi - rlo) ** -2 + (rhi + rlo) ** -2)
            assert float(coeff_F(i, n, p)) == pytest.approx(expected, rel=1e-12)


def test_F2_at_boundary_index():
    # i=2, n=-1 gives m=0: sines vanish, cosines are 1 for any tau
    for tau in (0.0, 0.37, 1.9):
        p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=tau)
        expected = -p.kappa * p.gamma / (2 * p.g**2)
        assert float(coeff_F(2, -1, p)) == pytest.approx(expected, rel=1e-13)
        assert rel_err(coeff_F(2, -1, p), ref_F(2, -1, p)) < 1e-13


def test_F_rejects_below_boundary():
    with pytest.raises(ValueError):
        coeff_F(1, -2, REF)
    with pytest.raises(ValueError):
        coeff_F(3, 0, REF)


@pytest.mark.parametrize("i", [1, 2])
@pytest.mark.parametrize("n", [-1, 0, 1, 4, 30, 500])
def test_F_matches_high_precision(i, n):
    p = MicrolaserParams(g=1.0, kappa=0.004, gamma=0.09, R=0.44, tau=0.63)
    assert rel_err(coeff_F(i, n, p), ref_F(i, n, p)) < 1e-13


def test_F_is_not_jointly_homogeneous_in_kappa_gamma():
    """The gamma/g cosine term carries a second power of the (kappa, gamma)
    pair, so F(s*kappa, s*gamma) != s*F in general; documents why no such
    scaling law is asserted."""
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.3)
    p2 = MicrolaserParams(g=1.0, kappa=0.002, gamma=0.2, R=0.2, tau=0.3)
    lhs = mp.mpf(repr(float(coeff_F(1, 3, p2))))
    rhs = 2 * ref_F(1, 3, p)
    assert abs(lhs - rhs) / abs(rhs) > 1e-4


# ---------------------------------------------------------------------------
# Y_n, Z_n


def test_Y_zero_flight_time_is_R():
    # at tau=0 both exponentials are 1 and F_1 = F_2, so Y_n = R exactly
    for gamma in (0.0, 0.1):
        p = MicrolaserParams(g=1.0, kappa=0.001, gamma=gamma, R=0.2, tau=0.0)
        y = coeff_Y(np.arange(0, 30), p)
        assert np.allclose(y, p.R, rtol=1e-12)


def test_Y_proportional_to_R():
    p1 = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.0, tau=0.4)
    assert np.all(coeff_Y(np.arange(0, 20), p1) == 0.0)


def test_Y_high_precision_value():
    assert float(coeff_Y(3, REF)) == pytest.approx(0.17769695863251119445,
                                                    rel=1e-13)
    assert rel_err(coeff_Y(3, REF), ref_Y(3, REF)) < 1e-13


def test_Z_zero_flight_time_is_zero():
    for gamma in (0.0, 0.1):
        p = MicrolaserParams(g=1.0, kappa=0.001, gamma=gamma, R=0.2, tau=0.0)
        assert np.allclose(coeff_Z(np.arange(0, 30), p), 0.0, atol=1e-18)


def test_Z_proportional_to_R():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.0, tau=0.4)
    assert np.all(coeff_Z(np.arange(0, 20), p) == 0.0)


def test_Z_high_precision_value():
    assert float(coeff_Z(0, REF)) == pytest.approx(0.00019134485752829029153,
                                                    rel=1e-13)
    assert rel_err(coeff_Z(0, REF), ref_Z(0, REF)) < 1e-13


@pytest.mark.parametrize("n", [0, 1, 2, 7, 40, 300])
def test_Y_Z_match_high_precision(n):
    # 1e-12 over the wide index range: residual cancellation between the two
    # F terms grows slowly with n (the pinned reference points above sit at
    # 1e-13)
    p = MicrolaserParams(g=1.0, kappa=0.004, gamma=0.09, R=0.44, tau=0.63)
    assert rel_err(coeff_Y(n, p), ref_Y(n, p)) < 1e-12
    assert rel_err(coeff_Z(n, p), ref_Z(n, p)) < 1e-12


def test_X_Y_Z_scale_linearly_with_R():
    base = MicrolaserParams(g=1.0, kappa=0.002, gamma=0.07, R=0.31, tau=0.52)
    double = MicrolaserParams(g=1.0, kappa=0.002, gamma=0.07, R=0.62, tau=0.52)
    ns = np.arange(1, 60, dtype=float)
    for fn in (coeff_X, coeff_Y, coeff_Z):
        a, b = fn(ns, base), fn(ns, double)
        assert np.allclose(b, 2.0 * a, rtol=1e-14)


def test_smoothness_in_tau():
    """Central differences at h=1e-6 and h=1e-7 agree to 1e-3 relative:
    no index-handling discontinuities."""
    p0 = dict(g=1.0, kappa=0.001, gamma=0.1, R=0.2)
    tau = 0.31
    ns = np.array([1.0, 2.0, 5.0, 11.0])
    for fn in (coeff_X, coeff_Y, coeff_Z):
        derivs = []
        for h in (1e-6, 1e-7):
            hi = fn(ns, MicrolaserParams(tau=tau + h, **p0))
            lo = fn(ns, MicrolaserParams(tau=tau - h, **p0))
            derivs.append((hi - lo) / (2 * h))
        assert np.allclose(derivs[0], derivs[1], rtol=1e-3)


# ---------------------------------------------------------------------------
# fraction terms


def test_fraction_terms_zero_flight_time():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=0.0)
    for n in (1, 2, 10):
        assert fraction_terms(n, p).f3 == 0.0


def test_fraction_terms_trapping():
    p = MicrolaserParams(g=1.0, kappa=0.001, gamma=0.1, R=0.2, tau=math.pi)
    assert abs(fraction_terms(1, p).f3) < 1e-27


def test_fraction_terms_high_precision_triple():
    t = fraction_terms(1, REF)
    # frozen from the mpmath transcription at 50 digits
    assert t.f1 == pytest.approx(4.3126536078341825099, rel=1e-12)
    assert t.f2 == pytest.approx(-13.363233452336489782, rel=1e-12)
    assert t.f3 == pytest.approx(-5.6270822207684731199, rel=1e-12)


def test_fraction_terms_domain():
    with pytest.raises(ValueError):
        fraction_terms(0, REF)


def test_fraction_terms_finite_and_f3_nonpositive():
    params = [
        REF,
        from_dimensionless(5, 0.01, 0.1, 0.7),
        from_dimensionless(100, 0.0001, 0.1, 3 * math.pi),
        MicrolaserParams(g=1.0, kappa=0.001, gamma=0.0, R=0.2, tau=2.0),
    ]
    for p in params:
        f1, f2, f3 = fraction_arrays(np.arange(1, 900, dtype=float), p)
        for arr in (f1, f2, f3):
            assert np.all(np.isfinite(arr))
        assert np.all(f3 <= 0.0)
