"""Coefficient functions feeding the steady-state continued fraction.

The coarse-grained equation of motion for the photon number distribution
couples P_{n-1}, P_n and P_{n+1} through rate coefficients that fold the
full dissipative Jaynes-Cummings transit of one atom (flight time tau,
cavity decay kappa and atomic decay gamma active throughout) into
effective gain/loss rates:

    A_n = 2 n kappa                                  (cavity loss ladder)
    X_n = R sin^2(g sqrt(n) tau) e^{-[gamma+(2n-1)kappa] tau}   (gain)
    Y_n, Z_n                                          (transit corrections)

Y_n and Z_n mix Rabi oscillation terms cos^2(g sqrt(n+1) tau) with the
auxiliary functions F_1, F_2 that carry the interference between the two
dressed-state decay paths.  The per-n triple fed to the continued fraction
is

    f1 = (Z_n + A_{n+1}) / kappa
    f2 = -2N + (Y_n - A_n) / kappa
    f3 = -X_n / kappa

with N = R/(2 kappa).  All functions here accept a scalar or an ndarray
photon index n and evaluate elementwise.

Note: F_i is *not* jointly homogeneous of degree 1 in (kappa, gamma):
the gamma/g cosine term carries a second power of the pair, so only the
proportionality of X_n, Y_n, Z_n to R survives as a scaling law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import MicrolaserParams


@dataclass(frozen=True)
class FractionTerms:
    """The triple (f1, f2, f3) entering v_n = f3 / (f2 + f1 v_{n+1})."""

    n: int
    f1: float
    f2: float
    f3: float


def coeff_A(n, p: MicrolaserParams):
    """Cavity loss coefficient A_n = 2 n kappa."""
    return 2.0 * np.asarray(n, dtype=float) * p.kappa


def coeff_X(n, p: MicrolaserParams):
    """Stimulated-emission gain X_n = R sin^2(g sqrt(n) tau) e^{-[gamma+(2n-1)kappa] tau}.

    Defined for n >= 1; nonnegative and bounded by R.
    """
    n = np.asarray(n, dtype=float)
    s = np.sin(p.g * np.sqrt(n) * p.tau)
    return p.R * s * s * np.exp(-(p.gamma + (2.0 * n - 1.0) * p.kappa) * p.tau)


def coeff_F(i, n, p: MicrolaserParams):
    """Dressed-state interference functions F_1(n), F_2(n).

    Both share the same two-bracket structure with prefactors
    (kappa/4g) / (sqrt(n+2) -+ sqrt(n+1))^2; the trig argument is
    2 g sqrt(m) tau with m = n+2 for i=1 and m = n+1 for i=2, and the
    signed terms of the second bracket take the upper sign for i=1.
    Valid for n >= -1 (n = -1 appears inside Y_0).
    """
    if i == 1:
        sign = 1.0
    elif i == 2:
        sign = -1.0
    else:
        raise ValueError(f"i must be 1 or 2, got {i}")
    n = np.asarray(n, dtype=float)
    if np.any(n < -1):
        raise ValueError("coeff_F requires n >= -1")

    g, kappa, gamma, tau = p.g, p.kappa, p.gamma, p.tau
    if kappa == 0.0:
        # outside the valid-params domain; every term carries the kappa/4g
        # prefactor against dimensionless ratios, taken as 0 here
        return np.zeros_like(n) if n.ndim else 0.0
    rlo = np.sqrt(n + 1.0)
    rhi = np.sqrt(n + 2.0)
    m = n + 2.0 if i == 1 else n + 1.0
    s = np.sin(2.0 * g * np.sqrt(m) * tau)
    c = np.cos(2.0 * g * np.sqrt(m) * tau)

    tot = rhi + rlo
    diff = 1.0 / tot  # sqrt(n+2) - sqrt(n+1), cancellation-free
    cross = 2.0 * rlo * rhi  # 2 sqrt((n+1)(n+2))
    pref = kappa / (4.0 * g)

    first = (gamma / kappa) * diff * s - (gamma / g) * c \
        - (2.0 * n + 3.0 + cross) * diff * s
    second = sign * (gamma / kappa) * tot * s - (gamma / g) * c \
        - sign * (2.0 * n + 3.0 - cross) * tot * s
    return pref * (first * tot * tot + second / (tot * tot))


def coeff_Y(n, p: MicrolaserParams):
    """Transit coefficient Y_n (uses F_1 and F_2 at index n-1).

    The half-ladder term (gamma/kappa + 2n + 1)/2 enters the two exponential
    brackets with opposite signs and nearly cancels (the exponents differ by
    2 kappa tau only), so it is grouped through expm1 instead of being
    evaluated bracket by bracket.
    """
    n = np.asarray(n, dtype=float)
    g, kappa, gamma, tau = p.g, p.kappa, p.gamma, p.tau
    c = np.cos(g * np.sqrt(n + 1.0) * tau)
    half_ladder = 0.5 * (gamma / kappa + 2.0 * n + 1.0)
    e_up = np.exp(-(gamma + (2.0 * n + 1.0) * kappa) * tau)
    e_dn = e_up * np.exp(2.0 * kappa * tau)
    return 0.5 * p.R * (
        2.0 * c * c * e_up
        + coeff_F(1, n - 1.0, p) * e_up - coeff_F(2, n - 1.0, p) * e_dn
        + half_ladder * e_up * np.expm1(2.0 * kappa * tau)
    )


def coeff_Z(n, p: MicrolaserParams):
    """Transit coefficient Z_n (uses F_1 and F_2 at index n); the near-equal
    half-ladder brackets are grouped through expm1 as in coeff_Y."""
    n = np.asarray(n, dtype=float)
    kappa, gamma, tau = p.kappa, p.gamma, p.tau
    half_ladder = 0.5 * (gamma / kappa + 2.0 * n + 3.0)
    e_up = np.exp(-(gamma + (2.0 * n + 1.0) * kappa) * tau)
    shrink = np.exp(-2.0 * kappa * tau)
    return 0.5 * p.R * e_up * (
        coeff_F(2, n, p) - coeff_F(1, n, p) * shrink
        - half_ladder * np.expm1(-2.0 * kappa * tau)
    )


def fraction_arrays(n, p: MicrolaserParams):
    """Vectorized (f1, f2, f3) for an array of photon indices n >= 1."""
    n = np.asarray(n, dtype=float)
    N = p.R / (2.0 * p.kappa)
    f1 = (coeff_Z(n, p) + coeff_A(n + 1.0, p)) / p.kappa
    f2 = -2.0 * N + (coeff_Y(n, p) - coeff_A(n, p)) / p.kappa
    f3 = -coeff_X(n, p) / p.kappa
    return f1, f2, f3


def fraction_terms(n: int, p: MicrolaserParams) -> FractionTerms:
    """The continued-fraction triple at photon index n >= 1."""
    if n < 1:
        raise ValueError(f"fraction_terms requires n >= 1, got {n}")
    f1, f2, f3 = fraction_arrays(n, p)
    assert f3 <= 0.0  # X_n >= 0 by construction
    return FractionTerms(n=n, f1=float(f1), f2=float(f2), f3=float(f3))
