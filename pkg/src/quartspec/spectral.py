"""Eigenvalues and weight numbers via characteristic determinants.

The characteristic function of problem k is the endpoint minor

    Delta_k(lambda) = det [ C_j^[4-s](1, lambda) ],  s, j = k+1..4,

with quasi-derivative order decreasing down the rows, and Delta_k^+ is
the same minor with column set {k, k+2, ..., 4}.  The 1x1 minors of
problem 3 come straight from the fundamental integration; the 2x2 and
3x3 minors of problems 2 and 1 are propagated as compound (wedge) states,
because assembling them from the fundamental columns cancels catastrophically
once exp(|rho|) passes 1/eps.  Values returned by the char_* helpers share
one log-scale factor per lambda which cancels in Newton steps and in the
weight ratio beta = -Delta_k^+ / Delta_k'.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import constants_from_primitives, predict_lambda
from .coefficients import Primitives
from .integrator import (
    DEFAULT_TOL,
    integrate_compound_many,
    integrate_fundamental_many,
)

_ROWS = {1: (2, 1, 0), 2: (1, 0), 3: (0,)}
_COLS = {1: (1, 2, 3), 2: (2, 3), 3: (3,)}
_COLS_PLUS = {1: (0, 2, 3), 2: (1, 3), 3: (2,)}

_NEWTON_MAXIT = 40
_RESIDUAL_PASS = 1e-8


class ContourError(RuntimeError):
    """A zero-count contour came too close to a root or failed to stabilize."""


class CompletenessError(RuntimeError):
    """Located roots disagree with a winding count over a validated contour."""


@dataclass
class SpectralDatum:
    """One eigenvalue record of problem k, optionally with its weight number."""

    n: int
    k: int
    lam: complex
    rho: complex
    residual: float
    method: str
    iterations: int
    beta: complex | None = None
    multiplicity: int = 1
    error: str | None = None


def sector_root(lam: complex) -> complex:
    """Fourth root of lambda with argument in [0, pi/2)."""
    lam = complex(lam)
    if lam == 0:
        return 0.0 + 0.0j
    rho = lam ** 0.25
    for _ in range(4):
        a = cmath.phase(rho)
        if -1e-15 <= a < math.pi / 2 - 1e-15:
            break
        rho *= 1j
    return rho


def _check_k(k: int):
    if k not in (1, 2, 3):
        raise ValueError(f"boundary condition index must be 1, 2 or 3, got {k}")


def _minor_dets(m: np.ndarray, rows, cols) -> np.ndarray:
    """Batched determinant of the (rows x cols) submatrix of (B, 4, 4) m."""
    r, c = rows, cols
    if len(r) == 1:
        return m[:, r[0], c[0]].copy()
    if len(r) == 2:
        return (
            m[:, r[0], c[0]] * m[:, r[1], c[1]]
            - m[:, r[0], c[1]] * m[:, r[1], c[0]]
        )
    a, b, d = r
    e, f, g = c
    return (
        m[:, a, e] * (m[:, b, f] * m[:, d, g] - m[:, b, g] * m[:, d, f])
        - m[:, a, f] * (m[:, b, e] * m[:, d, g] - m[:, b, g] * m[:, d, e])
        + m[:, a, g] * (m[:, b, e] * m[:, d, f] - m[:, b, f] * m[:, d, e])
    )


def _minor_dets_deriv(m: np.ndarray, dm: np.ndarray, rows, cols) -> np.ndarray:
    """Lambda-derivative of the minor via column-by-column replacement."""
    total = np.zeros(m.shape[0], dtype=np.complex128)
    for i in range(len(cols)):
        mixed = m.copy()
        ci = cols[i]
        mixed[:, :, ci] = dm[:, :, ci]
        total += _minor_dets(mixed, rows, cols)
    return total


def _bundle(p: Primitives, k: int, lams, tol: float, with_derivative: bool):
    """Normalized (Delta, Delta', Delta+, logs) for a batch of lambda.

    All three values share the single per-lambda factor exp(logs), so
    Delta/Delta' is the exact Newton step and -Delta+/Delta' the exact
    weight ratio.  The row-order sign of the determinant convention is
    applied, and for the compound paths the gauge powers are folded in.
    """
    _check_k(k)
    if k == 3:
        m, logs, dm = integrate_fundamental_many(
            p, lams, tol=tol, with_derivative=with_derivative
        )
        vals = m[:, 0, 3].copy()
        plus = m[:, 0, 2].copy()
        dvals = dm[:, 0, 3].copy() if with_derivative else None
        return vals, dvals, plus, logs
    order = 2 if k == 2 else 3
    z, logs, s = integrate_compound_many(
        p, order, lams, tol=tol, with_derivative=with_derivative
    )
    vals = -z[:, 0, 0]
    plus = -s * z[:, 1, 0]
    dvals = -z[:, 2, 0] if with_derivative else None
    power = -4 if k == 2 else -3
    return vals, dvals, plus, logs + power * np.log(s)


def char_many(p: Primitives, k: int, lams, tol: float = DEFAULT_TOL):
    """Characteristic values Delta_k at a batch of lambda.

    Returns (values, log_scale); the true determinant is value * exp(scale
    factor) which is never materialized.
    """
    vals, _, _, logs = _bundle(p, k, lams, tol, with_derivative=False)
    return vals, logs


def char_plus_many(p: Primitives, k: int, lams, tol: float = DEFAULT_TOL):
    _, _, plus, logs = _bundle(p, k, lams, tol, with_derivative=False)
    return plus, logs


def char_pair_many(p: Primitives, k: int, lams, tol: float = DEFAULT_TOL):
    """(Delta_k, Delta_k', Delta_k^+, log_scale) from one batched integration."""
    return _bundle(p, k, lams, tol, with_derivative=True)


def char_fn(p: Primitives, k: int, lam: complex, tol: float = DEFAULT_TOL):
    """Delta_k at a single lambda; returns (value, log_scale)."""
    vals, logs = char_many(p, k, [lam], tol=tol)
    return complex(vals[0]), float(logs[0])


def char_fn_plus(p: Primitives, k: int, lam: complex, tol: float = DEFAULT_TOL):
    vals, logs = char_plus_many(p, k, [lam], tol=tol)
    return complex(vals[0]), float(logs[0])


def _phases_winding(vals: np.ndarray):
    """(winding number, largest phase jump) along a closed sample loop."""
    ph = np.angle(vals)
    d = np.diff(np.concatenate([ph, ph[:1]]))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return d.sum() / (2.0 * math.pi), float(np.abs(d).max())


def count_zeros(
    p: Primitives,
    k: int,
    center: complex,
    radius: float,
    samples: int = 64,
    tol: float = DEFAULT_TOL,
) -> int:
    """Number of Delta_k zeros (with multiplicity) inside a circle.

    Raises ContourError when the contour passes too close to a zero or the
    phase increments refuse to settle; callers should retry with a nudged
    radius, see count_zeros_stable.
    """
    _check_k(k)
    if radius <= 0:
        raise ValueError(f"contour radius must be positive, got {radius}")
    m = max(16, int(samples))
    while True:
        ang = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        lams = center + radius * np.exp(1j * ang)
        vals, _ = char_many(p, k, lams, tol=tol)
        mags = np.abs(vals)
        if mags.min() < 1e-7 * np.median(mags):
            raise ContourError(
                f"characteristic function nearly vanishes on the circle "
                f"|lambda - {center:.6g}| = {radius:.6g}"
            )
        w, jump = _phases_winding(vals)
        if jump < math.pi / 2:
            nearest = round(w)
            if abs(w - nearest) < 0.05:
                return int(nearest)
        if m >= 4096:
            raise ContourError(
                f"winding count failed to stabilize on the circle "
                f"|lambda - {center:.6g}| = {radius:.6g}"
            )
        m *= 2


def count_zeros_stable(
    p: Primitives,
    k: int,
    center: complex,
    radius: float,
    samples: int = 64,
    tol: float = DEFAULT_TOL,
) -> int:
    """count_zeros with a few automatic radius nudges before giving up."""
    last = None
    for factor in (1.0, 1.0131, 0.9867, 1.0273, 0.9731):
        try:
            return count_zeros(p, k, center, radius * factor, samples, tol)
        except ContourError as exc:
            last = exc
    raise last


def _box_points(center: complex, half: float, per_edge: int) -> np.ndarray:
    t = np.arange(per_edge) / per_edge
    c = center
    right = c + half + 1j * half * (2.0 * t - 1.0)
    top = c + 1j * half + half * (1.0 - 2.0 * t)
    left = c - half + 1j * half * (1.0 - 2.0 * t)
    bottom = c - 1j * half + half * (2.0 * t - 1.0)
    return np.concatenate([right, top, left, bottom])


def _count_in_box(p, k, center, half, tol) -> int:
    per_edge = 24
    while True:
        pts = _box_points(center, half, per_edge)
        vals, _ = char_many(p, k, pts, tol=tol)
        mags = np.abs(vals)
        if mags.min() < 1e-7 * np.median(mags):
            raise ContourError(
                f"characteristic function nearly vanishes on the square at "
                f"{center:.6g}, half-width {half:.6g}"
            )
        w, jump = _phases_winding(vals)
        if jump < math.pi / 2:
            nearest = round(w)
            if abs(w - nearest) < 0.05:
                return int(nearest)
        if per_edge >= 768:
            raise ContourError(
                f"winding count failed to stabilize on the square at "
                f"{center:.6g}, half-width {half:.6g}"
            )
        per_edge *= 2


def _count_in_box_stable(p, k, center, half, tol) -> int:
    last = None
    for factor in (1.0, 1.0271, 0.9713, 1.0529):
        try:
            return _count_in_box(p, k, center, half * factor, tol)
        except ContourError as exc:
            last = exc
    raise last


def _newton_polish(p, k, seed, cap, tol):
    """Single capped Newton run; returns (lam, iterations, converged)."""
    lam = complex(seed)
    small_streak = 0
    for it in range(1, _NEWTON_MAXIT + 1):
        vals, dvals, _, _ = char_pair_many(p, k, [lam], tol=tol)
        v, dv = complex(vals[0]), complex(dvals[0])
        if dv == 0:
            return lam, it, False
        step = v / dv
        if abs(step) > cap:
            step *= cap / abs(step)
            small_streak = 0
        lam -= step
        if abs(step) <= 2e-13 * (1.0 + abs(lam)):
            small_streak += 1
            if small_streak >= 2:
                return lam, it, True
        else:
            small_streak = 0
    return lam, _NEWTON_MAXIT, False


def _locate_in_box(p, k, center, half, tol, depth=0):
    """Recursively isolate all zeros in a square; returns [(lam, mult), ...]."""
    count = _count_in_box_stable(p, k, center, half, tol)
    if count == 0:
        return []
    if count == 1:
        lam, _, ok = _newton_polish(p, k, center, cap=2.0 * half, tol=tol)
        inside = (
            abs(lam.real - center.real) <= 1.10 * half
            and abs(lam.imag - center.imag) <= 1.10 * half
        )
        if ok and inside:
            return [(lam, 1)]
    if half < 1e-6 * (1.0 + abs(center)) or depth >= 24:
        lam, _, ok = _newton_polish(p, k, center, cap=2.0 * half, tol=tol)
        return [(lam if ok else center, count)]
    found = []
    h2 = half / 2.0
    for dx in (-h2, h2):
        for dy in (-h2, h2):
            found.extend(
                _locate_in_box(p, k, center + dx + 1j * dy, h2, tol, depth + 1)
            )
    total = sum(mult for _, mult in found)
    if total != count:
        raise CompletenessError(
            f"square at {center:.6g} (half-width {half:.6g}) counts {count} "
            f"zeros but subdivision found {total}"
        )
    return found


def _newton_batch(p, k, seeds, caps, tol):
    """Capped Newton iteration on all seeds at once.

    Returns (roots, iterations, converged) arrays; one batched integration
    per sweep over the still-active subset.
    """
    lam = np.array(seeds, dtype=np.complex128)
    iters = np.zeros(lam.size, dtype=int)
    streak = np.zeros(lam.size, dtype=int)
    done = np.zeros(lam.size, dtype=bool)
    stuck = np.zeros(lam.size, dtype=bool)
    caps = np.asarray(caps, dtype=float)
    for _ in range(_NEWTON_MAXIT):
        active = ~done
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        vals, dvals, _, _ = char_pair_many(p, k, lam[idx], tol=tol)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(dvals != 0, vals / dvals, 0.0)
        mag = np.abs(step)
        over = mag > caps[idx]
        step[over] *= caps[idx][over] / mag[over]
        lam[idx] -= step
        iters[idx] += 1
        small = np.abs(step) <= 2e-13 * (1.0 + np.abs(lam[idx]))
        small &= ~over
        streak[idx] = np.where(small, streak[idx] + 1, 0)
        done[idx] |= streak[idx] >= 2
        stuck[idx] |= dvals == 0
        done[idx] |= dvals == 0
    return lam, iters, (streak >= 2) & ~stuck


def _residuals(p, k, lams, tol):
    """Dimensionless Newton residual |Delta| / (|Delta'| gap-scale)."""
    vals, dvals, _, _ = char_pair_many(p, k, lams, tol=tol)
    scale = 4.0 * (1.0 + np.abs(lams)) ** 0.75
    with np.errstate(divide="ignore", invalid="ignore"):
        res = np.abs(vals) / (np.abs(dvals) * scale)
    return np.where(np.isfinite(res), res, np.inf)


def find_eigenvalues(
    p: Primitives,
    k: int,
    nmax: int,
    tol: float = DEFAULT_TOL,
) -> list[SpectralDatum]:
    """First nmax eigenvalues of problem k, sorted by modulus then argument.

    Asymptotic predictions seed a batched Newton iteration on the
    characteristic determinant; the low-lying cluster and the full disk are
    validated against contour winding counts, with square subdivision as
    the fallback locator wherever Newton roots collide or go missing.
    """
    _check_k(k)
    if nmax < 1:
        raise ValueError(f"nmax must be >= 1, got {nmax}")
    ac = constants_from_primitives(p)
    seeds = np.array(
        [predict_lambda(k, n, ac) for n in range(1, nmax + 2)], dtype=np.complex128
    )
    gaps = np.abs(np.diff(seeds))
    caps = np.empty(nmax)
    caps[0] = 0.45 * gaps[0]
    if nmax > 1:
        caps[1:] = 0.45 * np.minimum(gaps[:-1], gaps[1:])

    roots, iters, ok = _newton_batch(p, k, seeds[:nmax], caps, tol)

    # Roots that collided or wandered are re-located by subdivision inside
    # a box around their seed.
    def _same(a, b):
        return abs(a - b) <= 1e-7 * (1.0 + max(abs(a), abs(b)))

    records = []  # (lam, mult, iterations, converged)
    claimed: list[complex] = []
    retry: list[int] = []
    for i in range(nmax):
        if not ok[i]:
            retry.append(i)
            continue
        if any(_same(roots[i], c) for c in claimed):
            retry.append(i)
            continue
        claimed.append(roots[i])
        records.append([complex(roots[i]), 1, int(iters[i]), True])

    for i in retry:
        half = 0.55 * caps[i] / 0.45
        hits = _locate_in_box(p, k, complex(seeds[i]), half, tol)
        for lam, mult in hits:
            if any(_same(lam, c) for c in claimed):
                continue  # already counted by a neighbour seed
            claimed.append(lam)
            records.append([lam, mult, _NEWTON_MAXIT, True])
        # An empty box leaves a hole; the disk count below will flag it.

    # Disk validation: every expected root inside the mid-gap circle.
    r_big = 0.5 * (abs(seeds[nmax - 1]) + abs(seeds[nmax]))
    expanded = [r for r in records for _ in range(r[1])]
    inside = [r for r in expanded if abs(r[0]) < r_big]
    total = count_zeros_stable(p, k, 0.0, r_big, samples=max(64, 4 * nmax), tol=tol)
    if total != len(inside):
        raise CompletenessError(
            f"problem {k}: contour |lambda| = {r_big:.6g} counts {total} zeros "
            f"but {len(inside)} were located"
        )

    expanded.sort(key=lambda r: (abs(r[0]), cmath.phase(r[0])))
    expanded = expanded[:nmax]
    lams = np.array([r[0] for r in expanded])
    resid = _residuals(p, k, lams, tol)
    out = []
    for n, (rec, rs) in enumerate(zip(expanded, resid), start=1):
        lam, mult, its, _ = rec
        err = None
        if not np.isfinite(rs) or rs > _RESIDUAL_PASS:
            err = f"residual {rs:.3e} above {_RESIDUAL_PASS:.1e}"
        out.append(
            SpectralDatum(
                n=n,
                k=k,
                lam=lam,
                rho=sector_root(lam),
                residual=float(rs),
                method="newton" if mult == 1 else "subdivision",
                iterations=its,
                multiplicity=mult,
                error=err,
            )
        )
    return out


def _residue_beta(p, k, lam, radius, tol):
    """-1/(2 pi i) of the contour integral of Delta^+/Delta around lam."""
    m = 64
    prev = None
    while m <= 512:
        ang = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        pts = lam + radius * np.exp(1j * ang)
        vals, _, pvals, _ = _bundle(p, k, pts, tol, with_derivative=False)
        if np.abs(vals).min() == 0.0:
            raise ContourError(
                f"characteristic function vanishes on the residue circle at "
                f"{lam:.6g}"
            )
        g = pvals / vals
        est = -(radius / m) * np.sum(g * np.exp(1j * ang))
        if prev is not None and abs(est - prev) <= 1e-9 * (1.0 + abs(est)):
            return complex(est)
        prev = est
        m *= 2
    return complex(prev)


def weight_numbers(
    p: Primitives,
    k: int,
    data: list[SpectralDatum],
    tol: float = DEFAULT_TOL,
) -> list[SpectralDatum]:
    """Weight numbers beta = -Delta_k^+ / Delta_k' for located eigenvalues.

    Simple roots use the direct derivative ratio from one batched
    integration; clustered or flat-derivative cases fall back to a contour
    residue of Delta_k^+/Delta_k around the eigenvalue.
    """
    _check_k(k)
    if not data:
        return []
    lams = np.array([d.lam for d in data], dtype=np.complex128)
    vals, dvals, plus, _ = char_pair_many(p, k, lams, tol=tol)

    ac = constants_from_primitives(p)
    seeds = np.array(
        [predict_lambda(k, n, ac) for n in range(1, len(data) + 2)],
        dtype=np.complex128,
    )
    seed_gaps = np.abs(np.diff(seeds))

    out = []
    for i, d in enumerate(data):
        gap = seed_gaps[min(i, seed_gaps.size - 1)]
        if len(data) > 1:
            near = min(abs(d.lam - e.lam) for e in data if e is not d)
            if near > 0:
                gap = min(gap, near)
        scale = max(abs(vals[i]), abs(plus[i]), 1e-300)
        flat = abs(dvals[i]) * gap < 1e-6 * scale
        if d.multiplicity > 1 or flat or dvals[i] == 0:
            beta = _residue_beta(p, k, d.lam, 0.5 * gap, tol)
            method = "contour-residue"
        else:
            beta = complex(-plus[i] / dvals[i])
            method = d.method
        out.append(dataclasses.replace(d, beta=beta, method=method))
    return out
