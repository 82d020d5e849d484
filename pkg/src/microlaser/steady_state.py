"""Steady-state photon statistics via backward continued-fraction recursion.

The probability ratios v_n = P_n / P_{n-1} obey

    v_n = f3(n) / (f2(n) + f1(n) v_{n+1})

which is evaluated backwards from a truncation index n_max (assuming
v_{n_max+1} = tail_v, default 0, since P_n must vanish as n grows).  The
distribution is then the normalized running product

    P_n = P_0 * prod_{m=1..n} v_m

accumulated in the log domain: products over hundreds of ratios overflow or
underflow doubles, log-sums do not.  Truncation is adaptive, doubling n_max
until the retained tail is negligible and the v-array is insensitive to the
truncation point.

A ratio v_m <= 0 terminates the support: v_m = 0 is a genuine trapping
barrier (the gain X_m vanishes where g sqrt(m) tau is a multiple of pi),
while v_m < 0 is unphysical, is recorded as a negative-weight diagnostic,
and zeroes the product from there on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import logsumexp

from .coefficients import fraction_arrays
from .params import (
    DimensionlessParams,
    MicrolaserParams,
    pump_parameter,
    to_dimensionless,
)

HARD_TRUNCATION_CAP = 20000


class ContinuedFractionSingular(RuntimeError):
    """Denominator f2 + f1 v_{n+1} collapsed below 1e-300 at index n."""

    def __init__(self, n: int):
        super().__init__(f"continued fraction denominator collapse at n = {n}")
        self.n = n


class TruncationNotConverged(RuntimeError):
    """Adaptive truncation exceeded the hard cap without converging."""


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated steady-state photon number distribution, held in log domain.

    log_p[n] is the natural log of P_n for n = 0..n_max (-inf outside the
    support).  tail_mass_bound is the crude geometric bound P_{n_max}*n_max
    on the discarded mass.  negative_weights lists photon indices where the
    recursion produced v_n < 0 (support was terminated at the first one).
    """

    log_p: np.ndarray
    n_max: int
    tail_mass_bound: float
    params_echo: DimensionlessParams
    negative_weights: tuple[int, ...] = field(default=())

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_p)


@dataclass(frozen=True)
class FieldMoments:
    """Mean photon number and the variance ratio v = sqrt(var(n)/<n>).

    v = 1 for Poissonian (coherent-state) light; v is undefined (NaN,
    classification "undefined") when <n> < 1e-12.
    """

    mean_n: float
    variance_ratio_v: float
    classification: str


class SolveResult(NamedTuple):
    distribution: PhotonDistribution
    moments: FieldMoments
    D: float


def _check_domain(p: MicrolaserParams):
    if not (p.g > 0) or not (p.kappa > 0):
        raise ValueError(f"g and kappa must be > 0 (got g={p.g}, kappa={p.kappa})")
    if p.gamma < 0 or p.R < 0 or p.tau < 0:
        raise ValueError(
            f"gamma, R, tau must be >= 0 (got gamma={p.gamma}, R={p.R}, tau={p.tau})"
        )


def continued_fraction(p: MicrolaserParams, n_max: int, tail_v: float = 0.0) -> np.ndarray:
    """Backward recursion for the ratios v_1..v_n_max (returned as a length
    n_max array, element k-1 holding v_k), starting from v_{n_max+1} = tail_v."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    _check_domain(p)
    ns = np.arange(1, n_max + 1, dtype=float)
    f1, f2, f3 = fraction_arrays(ns, p)
    v = np.empty(n_max)
    v_next = tail_v
    for k in range(n_max - 1, -1, -1):
        denom = f2[k] + f1[k] * v_next
        if abs(denom) < 1e-300:
            raise ContinuedFractionSingular(k + 1)
        v_next = f3[k] / denom
        v[k] = v_next
    return v


def _normalized_log_p(v: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Normalized log P_0..P_n_max from the ratio array v_1..v_n_max."""
    negative = tuple(int(i) + 1 for i in np.flatnonzero(v < 0.0))
    nonpos = np.flatnonzero(v <= 0.0)
    k = int(nonpos[0]) if nonpos.size else v.size  # number of usable factors
    log_p = np.full(v.size + 1, -np.inf)
    log_p[0] = 0.0
    if k > 0:
        log_p[1 : k + 1] = np.cumsum(np.log(v[:k]))
    return log_p - logsumexp(log_p), negative


def _front_half_converged(v_prev: np.ndarray, v_curr: np.ndarray, rel_tol: float) -> bool:
    half = v_prev.size // 2
    if half == 0:
        return True
    a, b = v_prev[:half], v_curr[:half]
    scale = np.maximum(np.abs(a), np.abs(b))
    return bool(np.all((scale == 0.0) | (np.abs(a - b) <= rel_tol * scale)))


def _adaptive_distribution(
    p: MicrolaserParams,
    v_of: Callable[[int], np.ndarray],
    rel_tol: float,
    n_cap: int,
) -> PhotonDistribution:
    if not (rel_tol > 0):
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")
    N = p.R / (2.0 * p.kappa)
    n_max = int(math.ceil(4.0 * N + 20.0))
    v_prev = None
    while True:
        if n_max > n_cap:
            raise TruncationNotConverged(
                f"adaptive truncation exceeded the hard cap {n_cap}"
            )
        v = v_of(n_max)
        log_p, negative = _normalized_log_p(v)
        tail_ok = log_p[-1] < math.log(rel_tol) + log_p.max()
        settled = v_prev is not None and _front_half_converged(v_prev, v, 1e-10)
        if tail_ok and settled:
            tail_bound = float(np.exp(log_p[-1])) * n_max
            return PhotonDistribution(
                log_p=log_p,
                n_max=n_max,
                tail_mass_bound=tail_bound,
                params_echo=to_dimensionless(p),
                negative_weights=negative,
            )
        v_prev = v
        n_max *= 2


def photon_distribution(
    p: MicrolaserParams, rel_tol: float = 1e-10, n_cap: int = HARD_TRUNCATION_CAP
) -> PhotonDistribution:
    """Steady-state P_n of the dissipative one-atom microlaser."""
    _check_domain(p)
    return _adaptive_distribution(p, lambda n: continued_fraction(p, n), rel_tol, n_cap)


def fixed_truncation_distribution(
    p: MicrolaserParams, n_max: int, tail_v: float = 0.0
) -> PhotonDistribution:
    """Distribution at a caller-chosen truncation (no adaptive doubling);
    used for truncation-stability checks."""
    v = continued_fraction(p, n_max, tail_v)
    log_p, negative = _normalized_log_p(v)
    return PhotonDistribution(
        log_p=log_p,
        n_max=n_max,
        tail_mass_bound=float(np.exp(log_p[-1])) * n_max,
        params_echo=to_dimensionless(p),
        negative_weights=negative,
    )


def _lossless_ratios(p: MicrolaserParams, n_max: int) -> np.ndarray:
    N = p.R / (2.0 * p.kappa)
    ns = np.arange(1, n_max + 1, dtype=float)
    s = np.sin(p.g * np.sqrt(ns) * p.tau)
    return N * s * s / ns


def lossless_baseline(
    p: MicrolaserParams, rel_tol: float = 1e-10, n_cap: int = HARD_TRUNCATION_CAP
) -> PhotonDistribution:
    """Steady state of the reference pump model with dissipation switched off
    during the flight time: detailed balance between the transit gain
    R sin^2(g sqrt(m) tau) and the cavity loss 2 kappa m gives the ratios
    v_m = N sin^2(g sqrt(m) tau) / m directly (no continued fraction)."""
    _check_domain(p)
    return _adaptive_distribution(p, lambda n: _lossless_ratios(p, n), rel_tol, n_cap)


def moments(d: PhotonDistribution) -> FieldMoments:
    """Mean photon number and normalized variance ratio of a distribution."""
    pvec = np.exp(d.log_p)
    ns = np.arange(pvec.size, dtype=float)
    mean = float(ns @ pvec)
    second = float((ns * ns) @ pvec)
    if mean < 1e-12:
        return FieldMoments(mean_n=mean, variance_ratio_v=math.nan,
                            classification="undefined")
    variance = max(second - mean * mean, 0.0)
    v = math.sqrt(variance / mean)
    if abs(v - 1.0) <= 1e-9:
        cls = "poissonian"
    elif v < 1.0:
        cls = "sub_poissonian"
    else:
        cls = "super_poissonian"
    return FieldMoments(mean_n=mean, variance_ratio_v=v, classification=cls)


def solve(p: MicrolaserParams, rel_tol: float = 1e-10) -> SolveResult:
    """One-call facade: distribution, moments and pump parameter D."""
    d = photon_distribution(p, rel_tol)
    return SolveResult(distribution=d, moments=moments(d), D=pump_parameter(p))
