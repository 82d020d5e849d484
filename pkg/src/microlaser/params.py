"""Physical and dimensionless parameter models for the one-atom microlaser.

All rates are expressed in units of the atom-field coupling g (we set g = 1
when constructing from dimensionless ratios).  The pump is a stream of
excited two-level atoms crossing the cavity one at a time: each atom spends
a fixed flight time tau inside the mode, and successive atoms are separated
by random gaps such that the mean cycle length is 1/R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class SingleAtomRegimeViolation(ValueError):
    """Raised when R*tau >= 1, i.e. the mean pump cycle 1/R does not
    exceed the flight time and transits would have to overlap."""


@dataclass(frozen=True)
class MicrolaserParams:
    """Physical rates of the microlaser.

    g      atom-field coupling (rad / time)
    kappa  cavity amplitude decay constant (1 / time); photon lifetime 1/(2 kappa)
    gamma  atomic decay constant (1 / time); atomic lifetime 1/(2 gamma)
    R      atomic flux rate (atoms / time)
    tau    flight time of each atom through the mode (time)
    """

    g: float
    kappa: float
    gamma: float
    R: float
    tau: float


@dataclass(frozen=True)
class DimensionlessParams:
    """The four dimensionless numbers the photon statistics depend on.

    N is the number of atoms crossing the cavity per photon lifetime,
    N = R / (2 kappa).
    """

    N: float
    kappa_over_g: float
    gamma_over_g: float
    g_tau: float


def from_dimensionless(N, kappa_over_g, gamma_over_g, g_tau) -> MicrolaserParams:
    """Build physical params from the dimensionless ratios, with g = 1.

    Raises ValueError on out-of-domain ratios and SingleAtomRegimeViolation
    when the implied R*tau >= 1 (strictly-one-atom-at-a-time pumping is
    inconsistent there).
    """
    if not (N > 0):
        raise ValueError(f"N must be > 0, got {N}")
    if not (kappa_over_g > 0):
        raise ValueError(f"kappa_over_g must be > 0, got {kappa_over_g}")
    if gamma_over_g < 0:
        raise ValueError(f"gamma_over_g must be >= 0, got {gamma_over_g}")
    if g_tau < 0:
        raise ValueError(f"g_tau must be >= 0, got {g_tau}")

    kappa = kappa_over_g
    R = 2.0 * kappa * N
    tau = g_tau
    if R * tau >= 1.0:
        raise SingleAtomRegimeViolation(
            f"R*tau = {R * tau:.6g} >= 1: mean pump cycle 1/R = {1.0 / R:.6g} "
            f"does not exceed the flight time tau = {tau:.6g}"
        )
    return MicrolaserParams(g=1.0, kappa=kappa, gamma=gamma_over_g, R=R, tau=tau)


def to_dimensionless(p: MicrolaserParams) -> DimensionlessParams:
    """Reduce physical params to the dimensionless ratios."""
    return DimensionlessParams(
        N=p.R / (2.0 * p.kappa),
        kappa_over_g=p.kappa / p.g,
        gamma_over_g=p.gamma / p.g,
        g_tau=p.g * p.tau,
    )


def pump_parameter(p: MicrolaserParams) -> float:
    """Pump parameter D = sqrt(N) * g * tau with N = R/(2 kappa)."""
    return math.sqrt(p.R / (2.0 * p.kappa)) * p.g * p.tau


def validate(p: MicrolaserParams) -> list[str]:
    """Check all model invariants; returns a list of violations (empty if valid).

    Never raises: callers decide whether a finding is fatal.
    """
    findings = []
    if not (p.g > 0):
        findings.append(f"g must be > 0 (got {p.g})")
    if not (p.kappa > 0):
        findings.append(f"kappa must be > 0 (got {p.kappa})")
    if p.gamma < 0:
        findings.append(f"gamma must be >= 0 (got {p.gamma})")
    if not (p.R > 0):
        findings.append(f"R must be > 0 (got {p.R})")
    if p.tau < 0:
        findings.append(f"tau must be >= 0 (got {p.tau})")
    if p.R > 0 and p.tau >= 0 and p.R * p.tau >= 1.0:
        findings.append(f"R*tau < 1 violated (R*tau = {p.R * p.tau:.6g})")
    return findings
