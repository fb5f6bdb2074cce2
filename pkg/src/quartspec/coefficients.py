"""Coefficient data and antiderivative primitives.

A problem instance is described by three coefficient functions on [0, 1],
given as uniform-grid samples: tau2 (the second-order coefficient), tau1
(the first-order coefficient) and r0, an L2 antiderivative of the possibly
distributional zero-order coefficient tau0 = r0'.  Everything downstream
works with the regularizing antiderivatives

    sigma0(x) = int_0^x r0 + c0 * x,   c0 = -int_0^1 r0,
    sigma1(x) = int_0^x tau1,

so that sigma0'' = tau0 with sigma0(0) = sigma0(1) = 0 and sigma1' = tau1
with sigma1(0) = 0.  Quadrature is composite trapezoid on the sample grid;
point evaluation is piecewise linear between samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

DEFAULT_GRID = 20001

_PRIMITIVE_KEYS = ("sigma0", "sigma1", "tau2", "tau2Int1", "tau2Int2")


def _as_samples(values, n: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("coefficient samples must be one-dimensional")
    if n is not None and arr.size != n:
        raise ValueError(f"expected {n} samples, got {arr.size}")
    if arr.size < 2:
        raise ValueError("grid too coarse: need at least 2 samples")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("coefficient samples must be finite")
    return arr


@dataclass(eq=False)
class CoefficientSet:
    """Uniform samples of (tau2, tau1, r0) on [0, 1]."""

    tau2: np.ndarray
    tau1: np.ndarray
    r0: np.ndarray

    def __post_init__(self):
        self.tau2 = _as_samples(self.tau2)
        self.tau1 = _as_samples(self.tau1, self.tau2.size)
        self.r0 = _as_samples(self.r0, self.tau2.size)

    @property
    def grid_size(self) -> int:
        return self.tau2.size

    @property
    def xgrid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size)


def component_samples(spec, grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Samples for one coefficient from an array or a preset string.

    Preset strings: "zero", "const:<c>", "linear:<a>,<b>" (a + b*x) and
    "step:<x0>,<h>" (height h for x > x0).  A step sample landing exactly
    on the jump takes the midpoint value h/2, which keeps the trapezoid
    quadrature of the step exact.
    """
    if not isinstance(spec, str):
        return _as_samples(spec, grid_size)
    x = np.linspace(0.0, 1.0, grid_size)
    name, _, args = spec.partition(":")
    try:
        if name == "zero":
            if args:
                raise ValueError("preset 'zero' takes no arguments")
            return np.zeros(grid_size, dtype=np.complex128)
        if name == "const":
            return np.full(grid_size, complex(args), dtype=np.complex128)
        if name == "linear":
            a, b = (complex(part) for part in args.split(","))
            return a + b * x.astype(np.complex128)
        if name == "step":
            x0_text, h_text = args.split(",")
            x0 = float(x0_text)
            h = complex(h_text)
            out = np.where(x > x0, h, 0.0 + 0.0j)
            out[np.isclose(x, x0, rtol=0.0, atol=1e-12)] = h / 2.0
            return out
    except ValueError as exc:
        raise ValueError(f"bad coefficient preset {spec!r}: {exc}") from exc
    raise ValueError(f"unknown coefficient preset {spec!r}")


# Whole-set presets used by the CLI and the verification suite.
SET_PRESETS = {
    "zero": ("zero", "zero", "zero"),
    "const": ("const:1", "const:1", "zero"),
    "linear": ("linear:1,1", "zero", "zero"),
    "dirac": ("zero", "zero", "step:0.5,1"),
    "mixed": ("linear:1,1", "const:1", "step:0.5,1"),
}


def preset_set(name: str, grid_size: int = DEFAULT_GRID) -> CoefficientSet:
    """Build a named whole-problem coefficient preset."""
    try:
        tau2, tau1, r0 = SET_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown coefficient preset {name!r}; "
            f"choose one of {sorted(SET_PRESETS)}"
        ) from None
    return CoefficientSet(
        component_samples(tau2, grid_size),
        component_samples(tau1, grid_size),
        component_samples(r0, grid_size),
    )


@dataclass(eq=False)
class Primitives:
    """Antiderivative samples plus the endpoint constants.

    Fields ending in Int are iterated antiderivatives of tau2:
    tau2_int1(x) = int_0^x tau2 and tau2_int2(x) = int_0^x tau2*tau2_int1.
    sigma0_prime holds r0 + c0, the absolutely continuous derivative of
    sigma0, needed when the quasi-derivative chain applies the product rule.
    """

    x: np.ndarray
    sigma0: np.ndarray
    sigma1: np.ndarray
    tau2: np.ndarray
    tau2_int1: np.ndarray
    tau2_int2: np.ndarray
    sigma0_prime: np.ndarray
    sigma1_prime: np.ndarray
    c0: complex
    theta: complex
    t0: complex
    t1: complex
    sigma: complex
    _tables: dict = field(default_factory=dict, repr=False)

    @property
    def grid_size(self) -> int:
        return self.x.size

    @property
    def h(self) -> float:
        return 1.0 / (self.x.size - 1)


def build_primitives(cs: CoefficientSet) -> Primitives:
    """Quadrature pass: antiderivatives and the constants theta, t0, t1, sigma."""
    h = 1.0 / (cs.grid_size - 1)
    r0_int = cumulative_trapezoid(cs.r0, dx=h, initial=0.0)
    c0 = -r0_int[-1]
    x = cs.xgrid
    sigma0 = r0_int + c0 * x
    sigma1 = cumulative_trapezoid(cs.tau1, dx=h, initial=0.0)
    tau2_int1 = cumulative_trapezoid(cs.tau2, dx=h, initial=0.0)
    tau2_int2 = cumulative_trapezoid(cs.tau2 * tau2_int1, dx=h, initial=0.0)
    return Primitives(
        x=x,
        sigma0=sigma0,
        sigma1=sigma1,
        tau2=cs.tau2.copy(),
        tau2_int1=tau2_int1,
        tau2_int2=tau2_int2,
        sigma0_prime=cs.r0 + c0,
        sigma1_prime=cs.tau1.copy(),
        c0=complex(c0),
        theta=complex(tau2_int1[-1]),
        t0=complex(cs.tau2[0]),
        t1=complex(cs.tau2[-1]),
        sigma=complex(sigma1[-1]),
    )


def _lerp(samples: np.ndarray, x: float) -> complex:
    # Uniform-grid piecewise-linear interpolation on [0, 1].
    n = samples.size
    pos = x * (n - 1)
    idx = int(pos)
    if idx >= n - 1:
        return complex(samples[-1])
    frac = pos - idx
    return complex(samples[idx] * (1.0 - frac) + samples[idx + 1] * frac)


def eval_primitive(p: Primitives, which: str, x: float) -> complex:
    """Point value of one primitive by linear interpolation of its samples."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x = {x} outside [0, 1]")
    if which == "sigma0":
        return _lerp(p.sigma0, x)
    if which == "sigma1":
        return _lerp(p.sigma1, x)
    if which == "tau2":
        return _lerp(p.tau2, x)
    if which == "tau2Int1":
        return _lerp(p.tau2_int1, x)
    if which == "tau2Int2":
        return _lerp(p.tau2_int2, x)
    raise ValueError(f"unknown primitive {which!r}; choose one of {_PRIMITIVE_KEYS}")
