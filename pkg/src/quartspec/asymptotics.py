"""Sector geometry, sharp eigenvalue/weight asymptotics and remainder checks.

Main terms implemented here, with A = sqrt(2) pi n + pi / (2 sqrt(2)) and
B = pi n + pi/2, theta = int tau2, t0 = tau2(0), t1 = tau2(1),
sigma = int tau1:

    lambda_{n,1} = -(A^4 - theta A^2 + (t0 + t1 + 4 sigma)/sqrt(2) * A)
    lambda_{n,2} =   B^4 - theta B^2 + (t0 + t1) * B
    lambda_{n,3} = -(A^4 - theta A^2 + (t0 + t1 - 4 sigma)/sqrt(2) * A)

    beta_{n,k}  = -4 lambda_{n,k} * (1 + (t0 + theta) / (8 (pi n)^2)),  k = 1, 3
    beta_{n,2}  = -4 lambda_{n,2} * (1 + (t0 + 2 theta) / (4 (pi n)^2))

The sign of the A-linear eigenvalue term was fixed against an independent
high-precision constant-coefficient oracle (see tests); it follows from
the fourth power of the rho expansion implemented in predict_rho3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import Primitives

_SQRT2 = math.sqrt(2.0)
_ROOT4 = (1.0 + 0.0j, -1.0 + 0.0j, 1.0j, -1.0j)


@dataclass(frozen=True)
class SectorContext:
    """Fourth roots of unity ordered for one half-sector of angle pi/8.

    omegas satisfies Re(rho*omega_1) < ... < Re(rho*omega_4) throughout the
    open sector kappa; big_omega is the Vandermonde-type matrix with entry
    (j, k) equal to omega_k**(j-1).
    """

    kappa: int
    omegas: tuple
    big_omega: np.ndarray


def omega_order(kappa: int) -> SectorContext:
    """Ordering context for sector kappa in {1, ..., 8}."""
    if kappa not in range(1, 9):
        raise ValueError(f"sector index must be in 1..8, got {kappa}")
    rho_mid = np.exp(1j * math.pi * (kappa - 0.5) / 8.0)
    omegas = tuple(sorted(_ROOT4, key=lambda w: (rho_mid * w).real))
    big = np.array([[w ** j for w in omegas] for j in range(4)], dtype=np.complex128)
    return SectorContext(kappa=kappa, omegas=omegas, big_omega=big)


def c_constants(ctx: SectorContext) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint expansion constants c_(0)jk and c_(1)jk, j in 0..3, k in 1..4.

    c_(0)jk =  1/4 sum_{l != k} (w_l/w_k)^j * w_l^-2 w_k / (w_l - w_k)
    c_(1)jk = -1/4 sum_{l != k} (w_l/w_k)^j * (w_l^-3 w_k^2 - w_l^-1) / (w_l - w_k)
    """
    w = ctx.omegas
    c0 = np.zeros((4, 4), dtype=np.complex128)
    c1 = np.zeros((4, 4), dtype=np.complex128)
    for j in range(4):
        for k in range(4):
            wk = w[k]
            acc0 = 0.0 + 0.0j
            acc1 = 0.0 + 0.0j
            for l in range(4):
                if l == k:
                    continue
                wl = w[l]
                ratio = (wl / wk) ** j
                acc0 += ratio * wl ** -2 * wk / (wl - wk)
                acc1 += ratio * (wl ** -3 * wk ** 2 - wl ** -1) / (wl - wk)
            c0[j, k] = acc0 / 4.0
            c1[j, k] = -acc1 / 4.0
    return c0, c1


def a_end_tables(ctx: SectorContext, t0: complex, t1: complex, sigma: complex):
    """Endpoint values of the rho^-2 expansion matrix, rows l, columns k."""
    w = ctx.omegas
    a0 = np.zeros((4, 4), dtype=np.complex128)
    a1 = np.zeros((4, 4), dtype=np.complex128)
    for l in range(4):
        for k in range(4):
            wl, wk = w[l], w[k]
            a0[l, k] = -0.25 * t0 * wl ** -2 * wk
            a1[l, k] = -0.25 * t1 * wl ** -2 * wk + 0.25 * sigma * (
                wl ** -3 * wk ** 2 - wl ** -1
            )
    return a0, a1


@dataclass(frozen=True)
class AsymptoticConstants:
    """Scalar constants of the problem plus the sector tables."""

    theta: complex
    t0: complex
    t1: complex
    sigma: complex
    ctx: SectorContext
    c0: np.ndarray
    c1: np.ndarray
    a_end0: np.ndarray
    a_end1: np.ndarray


def make_constants(
    theta: complex,
    t0: complex,
    t1: complex,
    sigma: complex,
    kappa: int = 1,
) -> AsymptoticConstants:
    ctx = omega_order(kappa)
    c0, c1 = c_constants(ctx)
    a0, a1 = a_end_tables(ctx, t0, t1, sigma)
    return AsymptoticConstants(
        theta=theta, t0=t0, t1=t1, sigma=sigma, ctx=ctx, c0=c0, c1=c1,
        a_end0=a0, a_end1=a1,
    )


def constants_from_primitives(p: Primitives, kappa: int = 1) -> AsymptoticConstants:
    return make_constants(p.theta, p.t0, p.t1, p.sigma, kappa=kappa)


def _check_kn(k: int, n: int):
    if k not in (1, 2, 3):
        raise ValueError(f"boundary condition index must be 1, 2 or 3, got {k}")
    if n < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {n}")


def predict_lambda(k: int, n: int, ac: AsymptoticConstants) -> complex:
    """Main asymptotic term of the n-th eigenvalue of problem k."""
    _check_kn(k, n)
    if k == 2:
        b = math.pi * n + math.pi / 2.0
        return b ** 4 - ac.theta * b ** 2 + (ac.t0 + ac.t1) * b
    a = _SQRT2 * math.pi * n + math.pi / (2.0 * _SQRT2)
    sign = -4.0 if k == 3 else 4.0
    lin = (ac.t0 + ac.t1 + sign * ac.sigma) / _SQRT2
    return -(a ** 4 - ac.theta * a ** 2 + lin * a)


def predict_rho3(n: int, ac: AsymptoticConstants) -> complex:
    """Refined rho location for problem 3 on the arg = pi/4 ray."""
    if n < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {n}")
    a = _SQRT2 * math.pi * n + math.pi / (2.0 * _SQRT2)
    pin2 = (math.pi * n) ** 2
    core = (
        a
        - ac.theta / (4.0 * a)
        - ac.sigma / (2.0 * _SQRT2 * pin2)
        + (ac.t0 + ac.t1) / (8.0 * _SQRT2 * pin2)
    )
    return np.exp(1j * math.pi / 4.0) * core


def predict_beta(k: int, n: int, lam: complex, ac: AsymptoticConstants) -> complex:
    """Main asymptotic term of the n-th weight number, given its eigenvalue."""
    _check_kn(k, n)
    pin2 = (math.pi * n) ** 2
    if k == 2:
        corr = (ac.t0 + 2.0 * ac.theta) / (4.0 * pin2)
    else:
        corr = (ac.t0 + ac.theta) / (8.0 * pin2)
    return -4.0 * lam * (1.0 + corr)


def reduced_char(rho: complex, ac: AsymptoticConstants, plus: bool = False) -> complex:
    """Reduced characteristic function d(rho) (or d+(rho)) in the first sector.

    Valid where the cross term exp(rho (omega_3 - omega_4)) does not grow,
    i.e. Re(rho (1 + i)) >= 0 for the first-sector ordering; zeros of d
    track the problem-3 eigenvalues through lambda = rho^4.
    """
    rho = complex(rho)
    if rho == 0:
        raise ValueError("reduced characteristic function undefined at rho = 0")
    w3, w4 = ac.ctx.omegas[2], ac.ctx.omegas[3]
    cross = (rho * (w3 - w4)).real
    if cross > 1e-12:
        raise ValueError("rho outside the closed first sector: cross term grows")
    th, t0, t1, sg = ac.theta, ac.t0, ac.t1, ac.sigma
    inv = 1.0 / rho
    inv2 = inv * inv
    tsum = t0 + t1
    tdiff = t0 - t1
    if plus:
        r1 = 4j - 1j * th * inv - 2j * sg * inv2 - 1j * tdiff * inv2 / 2.0 + 1j * th ** 2 * inv2 / 8.0
        r2 = 4j + th * inv + 2j * sg * inv2 + 1j * tdiff * inv2 / 2.0 - 1j * th ** 2 * inv2 / 8.0
    else:
        r1 = -4j + 1j * th * inv + 2j * sg * inv2 - 1j * tsum * inv2 / 2.0 - 1j * th ** 2 * inv2 / 8.0
        r2 = 4.0 - 1j * th * inv + 2.0 * sg * inv2 - tsum * inv2 / 2.0 - th ** 2 * inv2 / 8.0
    return r1 - r2 * np.exp(rho * (w3 - w4))


@dataclass
class RemainderReport:
    """l2-tail diagnostics for numeric-minus-predicted sequences."""

    kappa_hat: np.ndarray
    tail_max: float
    first_half_sum: float
    second_half_sum: float
    growth_ratio: float
    l2_consistent: bool


def remainder_analysis(numeric, predicted, power: int = 1) -> RemainderReport:
    """Scaled remainder sequence and an l2-consistency proxy.

    kappa_hat_j = (numeric_j - predicted_j) / j**power with j the 1-based
    position inside the supplied window.  The sequence is flagged
    consistent with an l2 remainder when the second-half partial sum of
    |kappa_hat|^2 grows by less than 10 percent of the first-half sum.
    """
    num = np.asarray(numeric, dtype=np.complex128)
    pred = np.asarray(predicted, dtype=np.complex128)
    if num.shape != pred.shape or num.ndim != 1:
        raise ValueError("numeric and predicted must be 1-d arrays of equal length")
    if num.size < 5:
        raise ValueError("need at least 5 terms for a tail estimate")
    j = np.arange(1, num.size + 1, dtype=float)
    kappa = (num - pred) / j ** power
    sq = np.abs(kappa) ** 2
    half = (num.size + 1) // 2
    first = float(sq[:half].sum())
    second = float(sq[half:].sum())
    if first > 0.0:
        ratio = second / first
    else:
        ratio = 0.0 if second == 0.0 else math.inf
    return RemainderReport(
        kappa_hat=kappa,
        tail_max=float(np.abs(kappa[half:]).max()),
        first_half_sum=first,
        second_half_sum=second,
        growth_ratio=ratio,
        l2_consistent=second <= 0.1 * first,
    )
