"""Adaptive integration of the regularized system in a scaled gauge.

The first-order system v' = (F(x) + lambda E_41) v is stiff in lambda: the
modes grow like exp(|lambda|^(1/4) x).  Three devices keep the fundamental
data in floating range and well conditioned:

* a diagonal gauge D = diag(1, s, s^2, s^3) with s = max(1, |lambda|^(1/4)),
  which balances every nonzero entry of the system matrix to O(s);
* running renormalization of each batch member to unit max-norm, with the
  accumulated factor kept as a log;
* compound (wedge-power) propagation for the 2x2 and 3x3 endpoint minors,
  which the fundamental columns alone cannot deliver: the columns align
  with the dominant modes and the minors cancel like exp(-|rho|) in
  float64.  Propagating the minors as states removes that cancellation.

All batch members share one Dormand-Prince 5(4) step sequence sized for
the worst member; renormalization factors and gauge powers are returned
separately so callers can reassemble true values or cancel them in ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import Primitives

DEFAULT_TOL = 1e-10

# Dormand-Prince 5(4) coefficients; the error row is b5 - b4.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_A71, _A73, _A74, _A75, _A76 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_RENORM_LIMIT = 1e2
_MIN_STEP = 1e-14
_MAX_STEPS = 400000


class IntegrationError(RuntimeError):
    """Adaptive stepping failed; x_fail records where."""

    def __init__(self, message: str, x_fail: float):
        super().__init__(message)
        self.x_fail = x_fail


@dataclass
class ScaledMatrixSolution:
    """Fundamental matrix at x = 1 for one lambda, max-norm 1.

    The true matrix is m * exp(log_scale); entry(q, j) is the quasi
    derivative of order q of the j-th column solution, j in 1..4.
    """

    m: np.ndarray
    log_scale: float

    def entry(self, quasi_order: int, column: int) -> complex:
        return complex(self.m[quasi_order, column - 1])


@dataclass
class FundamentalWithDerivative:
    sol: ScaledMatrixSolution
    dsol: ScaledMatrixSolution


class _Tables:
    """Contiguous copies of the primitive samples for fast interpolation."""

    def __init__(self, p: Primitives):
        self.n = p.grid_size
        self.h = p.h
        self.sigma0 = np.ascontiguousarray(p.sigma0)
        self.sigma1 = np.ascontiguousarray(p.sigma1)
        self.tau2 = np.ascontiguousarray(p.tau2)

    def at(self, x: float):
        pos = x / self.h
        i = int(pos)
        if i >= self.n - 1:
            i = self.n - 2
        w = pos - i
        s0 = self.sigma0[i] * (1.0 - w) + self.sigma0[i + 1] * w
        s1 = self.sigma1[i] * (1.0 - w) + self.sigma1[i + 1] * w
        t2 = self.tau2[i] * (1.0 - w) + self.tau2[i + 1] * w
        return s0, s1, t2


def _tables(p: Primitives) -> _Tables:
    tab = p._tables.get("integrator")
    if tab is None:
        tab = _Tables(p)
        p._tables["integrator"] = tab
    return tab


def _entries(tab: _Tables, x: float):
    """Scaled-gauge coupling entries of F at x (before division by s)."""
    s0, s1, t2 = tab.at(x)
    f21 = -(s1 + s0)
    f32 = -t2 + 2.0 * s0
    f41 = s0 * s0 - s1 * s1
    f43 = s1 - s0
    return f21, f32, f41, f43


def _rhs_fund(tab, x, state, s_col, inv_s, lam_s3, inv_s3, with_derivative):
    """Gauge-scaled fundamental system; state (B, R, 4), R = 4 or 8.

    Rows 0..3 hold the four gauge components of each of the four columns
    (transposed layout: state[b, q] is the q-th gauge row across columns);
    rows 4..7, when present, hold the lambda derivative.
    """
    f21, f32, f41, f43 = _entries(tab, x)
    out = np.empty_like(state)
    z0 = state[:, 0]
    z1 = state[:, 1]
    z2 = state[:, 2]
    z3 = state[:, 3]
    out[:, 0] = s_col * z1
    out[:, 1] = (f21 * inv_s)[:, None] * z0 + s_col * z2
    out[:, 2] = (f32 * inv_s)[:, None] * z1 + s_col * z3
    out[:, 3] = (f41 * inv_s3 + lam_s3)[:, None] * z0 + (f43 * inv_s)[:, None] * z2
    if with_derivative:
        w0 = state[:, 4]
        w1 = state[:, 5]
        w2 = state[:, 6]
        w3 = state[:, 7]
        out[:, 4] = s_col * w1
        out[:, 5] = (f21 * inv_s)[:, None] * w0 + s_col * w2
        out[:, 6] = (f32 * inv_s)[:, None] * w1 + s_col * w3
        out[:, 7] = (
            (f41 * inv_s3 + lam_s3)[:, None] * w0
            + (f43 * inv_s)[:, None] * w2
            + inv_s3[:, None] * z0
        )
    return out


def _rhs_comp2(tab, x, state, s_col, inv_s, lam_s3, inv_s3, with_derivative):
    """Second-compound (2x2 minor) system; state (B, R, 6).

    Components order the index pairs (01, 02, 03, 12, 13, 23) of the
    bivector p_ij; row 0 evolves the minor pair for Delta, row 1 for
    Delta+, row 2 (if present) the lambda derivative of row 0.
    """
    f21, f32, f41, f43 = _entries(tab, x)
    a21 = f21 * inv_s
    a32 = f32 * inv_s
    a43 = f43 * inv_s
    a41 = f41 * inv_s3 + lam_s3
    out = np.empty_like(state)
    for r in range(state.shape[1]):
        v = state[:, r]
        o = out[:, r]
        o[:, 0] = s_col[:, 0] * v[:, 1]
        o[:, 1] = a32 * v[:, 0] + s_col[:, 0] * (v[:, 3] + v[:, 2])
        o[:, 2] = a43 * v[:, 1] + s_col[:, 0] * v[:, 4]
        o[:, 3] = a21 * v[:, 1] + s_col[:, 0] * v[:, 4]
        o[:, 4] = -a41 * v[:, 0] + a21 * v[:, 2] + a43 * v[:, 3] + s_col[:, 0] * v[:, 5]
        o[:, 5] = -a41 * v[:, 1] + a32 * v[:, 4]
    if with_derivative:
        z = state[:, 0]
        out[:, 2, 4] -= inv_s3 * z[:, 0]
        out[:, 2, 5] -= inv_s3 * z[:, 1]
    return out


def _rhs_comp3(tab, x, state, s_col, inv_s, lam_s3, inv_s3, with_derivative):
    """Third-compound (3x3 minor) system; state (B, R, 4).

    Components order the index triples (012, 013, 023, 123) of the
    trivector q_ijk; rows as in the second compound.
    """
    f21, f32, f41, f43 = _entries(tab, x)
    a21 = f21 * inv_s
    a32 = f32 * inv_s
    a43 = f43 * inv_s
    a41 = f41 * inv_s3 + lam_s3
    out = np.empty_like(state)
    for r in range(state.shape[1]):
        v = state[:, r]
        o = out[:, r]
        o[:, 0] = s_col[:, 0] * v[:, 1]
        o[:, 1] = a43 * v[:, 0] + s_col[:, 0] * v[:, 2]
        o[:, 2] = a32 * v[:, 1] + s_col[:, 0] * v[:, 3]
        o[:, 3] = a41 * v[:, 0] + a21 * v[:, 2]
    if with_derivative:
        out[:, 2, 3] += inv_s3 * state[:, 0, 0]
    return out


def _norms(state: np.ndarray) -> np.ndarray:
    """Max-abs over everything but the batch axis."""
    return np.abs(state).reshape(state.shape[0], -1).max(axis=1)


def _propagate(tab, rhs, state, lams, tol, with_derivative, renorm="scale"):
    """Shared adaptive Dormand-Prince loop from x = 0 to x = 1.

    Returns (state, logs); every member is renormalized whenever its
    max-norm passes _RENORM_LIMIT.  The default scalar mode divides by
    the norm and accumulates its log, keeping all rows on one shared
    scale.  Mode "qr" restarts from the orthonormal factor instead and
    accumulates the log moduli of the triangular diagonal, which keeps
    the determinant bookkeeping exact mode by mode; it applies only to
    square single-block states.
    """
    batch = state.shape[0]
    s = np.maximum(1.0, np.abs(lams) ** 0.25)
    s_col = s[:, None]
    inv_s = 1.0 / s
    inv_s3 = inv_s ** 3
    lam_s3 = lams * inv_s3
    logs = np.zeros(batch)

    x = 0.0
    h = min(0.05, 0.5 / (1.0 + float(s.max())))
    k1 = rhs(tab, x, state, s_col, inv_s, lam_s3, inv_s3, with_derivative)
    steps = 0
    while 1.0 - x > 1e-14:
        h = min(h, 1.0 - x)
        k2 = rhs(tab, x + _C2 * h, state + h * (_A21 * k1), s_col, inv_s, lam_s3, inv_s3, with_derivative)
        k3 = rhs(tab, x + _C3 * h, state + h * (_A31 * k1 + _A32 * k2), s_col, inv_s, lam_s3, inv_s3, with_derivative)
        k4 = rhs(tab, x + _C4 * h, state + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), s_col, inv_s, lam_s3, inv_s3, with_derivative)
        k5 = rhs(tab, x + _C5 * h, state + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), s_col, inv_s, lam_s3, inv_s3, with_derivative)
        k6 = rhs(tab, x + h, state + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5), s_col, inv_s, lam_s3, inv_s3, with_derivative)
        new = state + h * (_A71 * k1 + _A73 * k3 + _A74 * k4 + _A75 * k5 + _A76 * k6)
        k7 = rhs(tab, x + h, new, s_col, inv_s, lam_s3, inv_s3, with_derivative)
        err_vec = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = tol * np.maximum(np.maximum(_norms(state), _norms(new)), 1e-290)
        err = float((_norms(err_vec) / scale).max())
        if err <= 1.0:
            x += h
            state = new
            k1 = k7
            nrm = _norms(state)
            big = nrm > _RENORM_LIMIT
            if big.any():
                if renorm == "qr":
                    # column-space restart: the discarded triangular
                    # factors multiply on the right, so the running
                    # determinant is the diagonal log sum
                    for b in np.nonzero(big)[0]:
                        q, r = np.linalg.qr(state[b])
                        state[b] = q
                        logs[b] += float(
                            np.log(np.abs(np.diagonal(r))).sum()
                        )
                    k1 = rhs(tab, x, state, s_col, inv_s, lam_s3, inv_s3,
                             with_derivative)
                else:
                    factor = np.where(big, nrm, 1.0)
                    state /= factor[:, None, None]
                    k1 /= factor[:, None, None]
                    logs += np.log(factor)
        if err == 0.0:
            h *= 5.0
        else:
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = min(h, 0.1)
        if h < _MIN_STEP and 1.0 - x > 1e-12:
            raise IntegrationError(
                f"step size underflow at x = {x:.6g}", x_fail=x
            )
        steps += 1
        if steps > _MAX_STEPS:
            raise IntegrationError(
                f"step budget exhausted at x = {x:.6g}", x_fail=x
            )
    return state, logs


def integrate_fundamental_many(
    p: Primitives,
    lams,
    tol: float = DEFAULT_TOL,
    init: np.ndarray | None = None,
    with_derivative: bool = False,
):
    """Fundamental matrices at x = 1 for a batch of lambda values.

    Returns (m, log_scale, dm): m[b] is the 4x4 matrix of quasi-derivative
    rows by column solutions, renormalized to max-norm 1 with the true
    factor exp(log_scale[b]); dm is the matching lambda derivative when
    requested, sharing the same factor, else None.
    """
    lams = np.asarray(lams, dtype=np.complex128).ravel()
    if lams.size == 0:
        raise ValueError("need at least one lambda value")
    if not np.isfinite(lams).all():
        raise ValueError("lambda values must be finite")
    if tol <= 0 or tol > 1e-4:
        raise ValueError(f"tolerance must lie in (0, 1e-4], got {tol}")
    tab = _tables(p)
    batch = lams.size

    s = np.maximum(1.0, np.abs(lams) ** 0.25)
    expo = np.arange(4)[:, None] - np.arange(4)[None, :]
    pow_up = s[:, None, None] ** expo[None, :, :]

    if init is None:
        init_m = np.broadcast_to(np.eye(4, dtype=np.complex128), (batch, 4, 4))
    else:
        init_m = np.asarray(init, dtype=np.complex128)
        if init_m.shape == (4, 4):
            init_m = np.broadcast_to(init_m, (batch, 4, 4))
        elif init_m.shape != (batch, 4, 4):
            raise ValueError("init must be (4, 4) or (batch, 4, 4)")
    rows = 8 if with_derivative else 4
    state = np.zeros((batch, rows, 4), dtype=np.complex128)
    state[:, :4] = init_m / pow_up

    state, logs = _propagate(tab, _rhs_fund, state, lams, tol, with_derivative)

    m = state[:, :4] * pow_up
    nrm = np.maximum(_norms(m), 1e-290)
    m /= nrm[:, None, None]
    logs += np.log(nrm)
    if with_derivative:
        dm = state[:, 4:] * pow_up
        dm /= nrm[:, None, None]
        return m, logs, dm
    return m, logs, None


# Compound state layouts: initial unit components for the Delta and
# Delta+ minors, and the gauge power linking the leading component back
# to the true minor: Delta = -s**power * z[..., 0] * exp(logs).
_COMP2_INIT = {"minus": 5, "plus": 4}  # e2^e3 and e1^e3
_COMP2_POWER = {"minus": -4, "plus": -3}
_COMP3_INIT = {"minus": 3, "plus": 2}  # e1^e2^e3 and e0^e2^e3
_COMP3_POWER = {"minus": -3, "plus": -2}


def integrate_compound_many(
    p: Primitives,
    order: int,
    lams,
    tol: float = DEFAULT_TOL,
    with_derivative: bool = False,
):
    """Endpoint minors of the fundamental system via wedge-power states.

    order 2 propagates 2x2 minors (6 components, pairs 01, 02, 03, 12,
    13, 23), order 3 the 3x3 minors (4 components, triples 012, 013, 023,
    123).  Row 0 starts from the minor defining Delta (trailing columns),
    row 1 from the Delta+ column set, row 2 (when with_derivative) carries
    the lambda derivative of row 0.  Returns (z, logs, s) with z of shape
    (batch, rows, dim) jointly renormalized per member.
    """
    lams = np.asarray(lams, dtype=np.complex128).ravel()
    if lams.size == 0:
        raise ValueError("need at least one lambda value")
    if not np.isfinite(lams).all():
        raise ValueError("lambda values must be finite")
    if tol <= 0 or tol > 1e-4:
        raise ValueError(f"tolerance must lie in (0, 1e-4], got {tol}")
    if order == 2:
        dim, rhs, inits = 6, _rhs_comp2, _COMP2_INIT
    elif order == 3:
        dim, rhs, inits = 4, _rhs_comp3, _COMP3_INIT
    else:
        raise ValueError(f"compound order must be 2 or 3, got {order}")
    tab = _tables(p)
    batch = lams.size
    rows = 3 if with_derivative else 2
    state = np.zeros((batch, rows, dim), dtype=np.complex128)
    state[:, 0, inits["minus"]] = 1.0
    state[:, 1, inits["plus"]] = 1.0

    state, logs = _propagate(tab, rhs, state, lams, tol, with_derivative)

    nrm = np.maximum(_norms(state), 1e-290)
    state /= nrm[:, None, None]
    logs += np.log(nrm)
    s = np.maximum(1.0, np.abs(lams) ** 0.25)
    return state, logs, s


def integrate_fundamental(
    p: Primitives,
    lam: complex,
    tol: float = DEFAULT_TOL,
    init: np.ndarray | None = None,
) -> ScaledMatrixSolution:
    """Single-lambda convenience wrapper around the batched integrator."""
    m, logs, _ = integrate_fundamental_many(p, [lam], tol=tol, init=init)
    return ScaledMatrixSolution(m=m[0], log_scale=float(logs[0]))


def integrate_with_lambda_derivative(
    p: Primitives,
    lam: complex,
    tol: float = DEFAULT_TOL,
) -> FundamentalWithDerivative:
    m, logs, dm = integrate_fundamental_many(
        p, [lam], tol=tol, with_derivative=True
    )
    L = float(logs[0])
    return FundamentalWithDerivative(
        sol=ScaledMatrixSolution(m=m[0], log_scale=L),
        dsol=ScaledMatrixSolution(m=dm[0], log_scale=L),
    )


def liouville_defect(p: Primitives, lams, tol: float = DEFAULT_TOL) -> np.ndarray:
    """|log det| of the true endpoint matrix, per lambda in the batch.

    The first-order coefficient matrix is trace free, so the exact
    fundamental matrix keeps determinant 1 at every lambda.  A naive
    determinant of the scalar-renormalized endpoint matrix loses this
    once the scale factor exceeds the float64 det resolution, because
    the columns align exponentially; here the propagation restarts from
    QR factors instead, so the volume arrives as a cancellation-free sum
    of diagonal log moduli plus the log determinant of a well
    conditioned remainder.  Values near zero certify the integration.
    """
    lams = np.asarray(lams, dtype=np.complex128).ravel()
    if lams.size == 0:
        raise ValueError("need at least one lambda value")
    if not np.isfinite(lams).all():
        raise ValueError("lambda values must be finite")
    if tol <= 0 or tol > 1e-4:
        raise ValueError(f"tolerance must lie in (0, 1e-4], got {tol}")
    tab = _tables(p)
    state = np.broadcast_to(
        np.eye(4, dtype=np.complex128), (lams.size, 4, 4)
    ).copy()
    state, logs = _propagate(
        tab, _rhs_fund, state, lams, tol, with_derivative=False, renorm="qr"
    )
    _, logdet = np.linalg.slogdet(state)
    return np.abs(logdet + logs)
