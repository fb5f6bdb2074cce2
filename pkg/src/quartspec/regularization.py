"""Quasi-derivative regularization of the fourth-order expression.

The differential expression

    l(y) = y'''' + (tau2 y')' + (tau1 y)' + tau1 y' + tau0 y

with tau0 = r0' distributional is rewritten through the associated matrix

         ( 0                  1             0             0 )
    F =  ( -(sigma1+sigma0)   0             1             0 )
         ( 0                  -tau2+2sigma0 0             1 )
         ( sigma0^2-sigma1^2  0             sigma1-sigma0 0 )

whose entries are regular.  Quasi-derivatives follow the recursion
y^[k] = (y^[k-1])' - sum_{j<=k} f_{k,j} y^[j-1], and l(y) = y^[4] holds on
the natural domain.  The eigenvalue system is v' = (F + Lambda) v with
Lambda carrying lambda in entry (4, 1).
"""

from __future__ import annotations

import numpy as np

from .coefficients import Primitives, _lerp


def _f_entries(p: Primitives, x: float) -> tuple[complex, complex, complex, complex]:
    """Nontrivial F entries (f21, f32, f41, f43) at a point."""
    s0 = _lerp(p.sigma0, x)
    s1 = _lerp(p.sigma1, x)
    t2 = _lerp(p.tau2, x)
    return (-(s1 + s0), -t2 + 2.0 * s0, s0 * s0 - s1 * s1, s1 - s0)


def assemble_F(p: Primitives, x: float) -> np.ndarray:
    """Associated matrix F(x) as a 4x4 complex array."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = {x} outside [0, 1]")
    f21, f32, f41, f43 = _f_entries(p, x)
    F = np.zeros((4, 4), dtype=np.complex128)
    F[0, 1] = 1.0
    F[1, 0] = f21
    F[1, 2] = 1.0
    F[2, 1] = f32
    F[2, 3] = 1.0
    F[3, 0] = f41
    F[3, 2] = f43
    return F


def system_rhs(p: Primitives, lam: complex, x: float, v: np.ndarray) -> np.ndarray:
    """Right-hand side (F(x) + Lambda) v of the first-order system."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (4,):
        raise ValueError("state vector must have shape (4,)")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = {x} outside [0, 1]")
    f21, f32, f41, f43 = _f_entries(p, x)
    return np.array(
        [
            v[1],
            f21 * v[0] + v[2],
            f32 * v[1] + v[3],
            (f41 + lam) * v[0] + f43 * v[2],
        ],
        dtype=np.complex128,
    )


def quasi_chain(p: Primitives, derivatives, coefficient_derivatives=None) -> list:
    """Quasi-derivatives y^[0..4] of a manufactured solution, sampled on the grid.

    derivatives supplies y, y', y'', y''', y'''' as arrays on p's grid.  The
    derivative of each y^[k-1] is expanded by the product rule; derivatives
    of the sampled factors come from the primitives (sigma0' = r0 + c0,
    sigma1' = tau1).  The final step also needs tau2', tau1' and tau0,
    which are not recoverable from samples: pass them analytically via
    coefficient_derivatives = (tau2', tau1', tau0) for smooth coefficient
    sets, or leave None when all three vanish (constant tau2, tau1 and
    constant r0).  Intended for verifying y^[4] = l(y) on smooth data.
    """
    if len(derivatives) != 5:
        raise ValueError("need the 5 classical derivatives y, y', ..., y''''")
    n = p.grid_size
    ys = []
    for d in derivatives:
        arr = np.asarray(d, dtype=np.complex128)
        if arr.shape != (n,):
            raise ValueError("derivative grid does not match the primitives grid")
        ys.append(arr)
    if coefficient_derivatives is None:
        tau2_p = np.zeros(n, dtype=np.complex128)
        tau1_p = np.zeros(n, dtype=np.complex128)
        tau0 = np.zeros(n, dtype=np.complex128)
    else:
        tau2_p, tau1_p, tau0 = (
            np.asarray(d, dtype=np.complex128) for d in coefficient_derivatives
        )
        if tau2_p.shape != (n,) or tau1_p.shape != (n,) or tau0.shape != (n,):
            raise ValueError("coefficient derivative grid mismatch")

    y0, y1c, y2c, y3c, y4c = ys
    s0, s1 = p.sigma0, p.sigma1
    s0p, s1p = p.sigma0_prime, p.sigma1_prime
    t2 = p.tau2

    q1 = y1c
    q2 = y2c + (s1 + s0) * y0
    # q2' = y''' + (sigma1' + sigma0') y + (sigma1 + sigma0) y'
    q3 = y3c + (s1p + s0p) * y0 + (s1 + s0) * y1c + (t2 - 2.0 * s0) * q1
    # q3 = y''' + (sigma1 - sigma0 + tau2) y' + (tau1 + sigma0') y, so
    # q3' = y'''' + (sigma1' - sigma0' + tau2') y' + (sigma1 - sigma0 + tau2) y''
    #       + (tau1' + tau0) y + (tau1 + sigma0') y'
    q3p = (
        y4c
        + (s1p - s0p + tau2_p) * y1c
        + (s1 - s0 + t2) * y2c
        + (tau1_p + tau0) * y0
        + (s1p + s0p) * y1c
    )
    q4 = q3p - (s0 * s0 - s1 * s1) * y0 - (s1 - s0) * q2
    return [y0, q1, q2, q3, q4]
