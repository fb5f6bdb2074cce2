"""Command line front end for spectra, weights, predictions and checks.

Subcommands:

  spectrum   eigenvalues of one boundary value problem
  weights    eigenvalues plus weight numbers
  predict    asymptotic main terms only (no integration)
  verify     numeric spectrum against predictions with remainder diagnostics
  selfcheck  fast built-in sanity suite on the zero-coefficient problem

Exit status: 0 on success, 2 when the numerics fail or a check does not
pass, 3 for bad usage or unreadable input.  Output is JSON (sorted keys)
or CSV with a fixed column order, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    constants_from_primitives,
    predict_beta,
    predict_lambda,
    remainder_analysis,
)
from .coefficients import (
    DEFAULT_GRID,
    CoefficientSet,
    SET_PRESETS,
    build_primitives,
    component_samples,
    preset_set,
)
from .integrator import IntegrationError
from .spectral import (
    CompletenessError,
    ContourError,
    count_zeros,
    char_fn,
    find_eigenvalues,
    sector_root,
    weight_numbers,
)


class CliInputError(ValueError):
    """Bad command line input or unreadable coefficient file."""


@dataclass
class RunConfig:
    command: str
    problem: int = 3
    coeffs: str = "zero"
    nmax: int = 10
    tol: float = 1e-10
    fmt: str = "json"
    out: str | None = None
    grid: int = DEFAULT_GRID


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliInputError(message)


def _component_from_json(value, grid: int, name: str) -> np.ndarray:
    if isinstance(value, str):
        try:
            return component_samples(value, grid)
        except ValueError as exc:
            raise CliInputError(f"field {name!r}: {exc}") from exc
    try:
        arr = np.asarray(value, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise CliInputError(f"field {name!r} is not numeric") from exc
    if arr.ndim == 2 and arr.shape[1] == 2:
        arr = arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim != 1 or arr.size != grid:
        raise CliInputError(
            f"field {name!r} must hold {grid} samples, got shape {arr.shape}"
        )
    return arr


def load_coefficients(source: str, grid: int) -> CoefficientSet:
    """Coefficient set from a preset name or a JSON sample file.

    A file holds {"grid": N, "tau2": ..., "tau1": ..., "r0": ...} where each
    component is a preset string, a list of reals, or a list of [re, im]
    pairs of length N.
    """
    if source in SET_PRESETS:
        return preset_set(source, grid_size=grid)
    try:
        with open(source, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliInputError(f"cannot read coefficient file {source!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"coefficient file {source!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliInputError("coefficient file must hold a JSON object")
    n = raw.get("grid", grid)
    if not isinstance(n, int) or n < 2:
        raise CliInputError(f"grid must be an integer >= 2, got {n!r}")
    missing = [f for f in ("tau2", "tau1", "r0") if f not in raw]
    if missing:
        raise CliInputError(f"coefficient file lacks fields: {', '.join(missing)}")
    return CoefficientSet(
        tau2=_component_from_json(raw["tau2"], n, "tau2"),
        tau1=_component_from_json(raw["tau1"], n, "tau1"),
        r0=_component_from_json(raw["r0"], n, "r0"),
    )


def _fmt_float(x: float) -> str:
    return f"{x:.15g}"


def _emit(cfg: RunConfig, payload: dict, columns: list[str], rows: list[dict]):
    if cfg.fmt == "json":
        body = dict(payload)
        body["rows"] = rows
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for col in columns:
                v = row[col]
                if isinstance(v, float):
                    cells.append(_fmt_float(v))
                else:
                    cells.append(str(v))
            buf.write(",".join(cells) + "\n")
        for key in sorted(payload):
            if key not in ("command", "problem", "coefficients", "nmax", "tol"):
                buf.write(f"# {key} = {payload[key]}\n")
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spectrum_rows(data, with_beta: bool):
    rows = []
    for d in data:
        row = {
            "n": d.n,
            "k": d.k,
            "re_lambda": float(d.lam.real),
            "im_lambda": float(d.lam.imag),
            "re_rho": float(d.rho.real),
            "im_rho": float(d.rho.imag),
            "residual": float(d.residual),
            "iterations": d.iterations,
            "method": d.method,
        }
        if with_beta:
            row["re_beta"] = float(d.beta.real)
            row["im_beta"] = float(d.beta.imag)
        rows.append(row)
    return rows


_SPECTRUM_COLS = [
    "n", "k", "re_lambda", "im_lambda", "re_rho", "im_rho",
    "residual", "iterations", "method",
]
_WEIGHT_COLS = _SPECTRUM_COLS[:6] + ["re_beta", "im_beta"] + _SPECTRUM_COLS[6:]


def _meta(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "problem": cfg.problem,
        "coefficients": cfg.coeffs,
        "nmax": cfg.nmax,
        "tol": cfg.tol,
    }


def _run_spectrum(cfg: RunConfig, p) -> int:
    data = find_eigenvalues(p, cfg.problem, cfg.nmax, tol=cfg.tol)
    if cfg.command == "weights":
        data = weight_numbers(p, cfg.problem, data, tol=cfg.tol)
        cols, rows = _WEIGHT_COLS, _spectrum_rows(data, with_beta=True)
    else:
        cols, rows = _SPECTRUM_COLS, _spectrum_rows(data, with_beta=False)
    _emit(cfg, _meta(cfg), cols, rows)
    flagged = [d.n for d in data if d.error]
    if flagged:
        print(f"warning: entries above residual gate: n = {flagged}", file=sys.stderr)
        return 2
    return 0


def _run_predict(cfg: RunConfig, p) -> int:
    ac = constants_from_primitives(p)
    rows = []
    for n in range(1, cfg.nmax + 1):
        lam = predict_lambda(cfg.problem, n, ac)
        beta = predict_beta(cfg.problem, n, lam, ac)
        rho = sector_root(lam)
        rows.append(
            {
                "n": n,
                "k": cfg.problem,
                "re_lambda": float(lam.real),
                "im_lambda": float(lam.imag),
                "re_rho": float(rho.real),
                "im_rho": float(rho.imag),
                "re_beta": float(beta.real),
                "im_beta": float(beta.imag),
            }
        )
    cols = ["n", "k", "re_lambda", "im_lambda", "re_rho", "im_rho", "re_beta", "im_beta"]
    _emit(cfg, _meta(cfg), cols, rows)
    return 0


def _run_verify(cfg: RunConfig, p) -> int:
    if cfg.nmax < 5:
        raise CliInputError("verify needs nmax >= 5 for a remainder window")
    ac = constants_from_primitives(p)
    data = find_eigenvalues(p, cfg.problem, cfg.nmax, tol=cfg.tol)
    num = np.array([d.lam for d in data])
    pred = np.array([predict_lambda(cfg.problem, d.n, ac) for d in data])
    start = 5 if cfg.nmax >= 9 else 1
    rep = remainder_analysis(num[start - 1 :], pred[start - 1 :], power=1)
    rows = []
    for i, d in enumerate(data):
        row = {
            "n": d.n,
            "k": d.k,
            "re_lambda_num": float(num[i].real),
            "im_lambda_num": float(num[i].imag),
            "re_lambda_pred": float(pred[i].real),
            "im_lambda_pred": float(pred[i].imag),
            "abs_err": float(abs(num[i] - pred[i])),
            "re_kappa_hat": float("nan"),
            "im_kappa_hat": float("nan"),
        }
        if d.n >= start:
            kh = rep.kappa_hat[d.n - start]
            row["re_kappa_hat"] = float(kh.real)
            row["im_kappa_hat"] = float(kh.imag)
        rows.append(row)
    payload = _meta(cfg)
    payload["window_start"] = start
    payload["l2_consistent"] = bool(rep.l2_consistent)
    payload["growth_ratio"] = float(rep.growth_ratio)
    payload["tail_max"] = float(rep.tail_max)
    cols = [
        "n", "k", "re_lambda_num", "im_lambda_num", "re_lambda_pred",
        "im_lambda_pred", "abs_err", "re_kappa_hat", "im_kappa_hat",
    ]
    _emit(cfg, payload, cols, rows)
    flagged = [d.n for d in data if d.error]
    if flagged or not rep.l2_consistent:
        return 2
    return 0


def _beam_rho1() -> float:
    """First positive root of cos(r) cosh(r) = 1 by bisection."""
    f = lambda r: math.cos(r) * math.cosh(r) - 1.0
    lo, hi = 4.0, 5.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _run_selfcheck(cfg: RunConfig) -> int:
    checks = []
    p = build_primitives(preset_set("zero"))

    v, L = char_fn(p, 3, 0.0)
    v *= math.exp(L)
    checks.append(("char-at-zero", abs(v - 1.0 / 6.0) < 1e-9, f"Delta_3(0) = {v:.12g}"))

    v16, L16 = char_fn(p, 3, 16.0)
    v16 *= math.exp(L16)
    target = (math.sinh(2.0) - math.sin(2.0)) / 16.0
    checks.append(
        ("char-closed-form", abs(v16 - target) < 1e-8, f"Delta_3(16) = {v16:.12g}")
    )

    data = find_eigenvalues(p, 2, 3, tol=cfg.tol)
    rho1 = data[0].rho.real
    beam = _beam_rho1()
    checks.append(
        (
            "beam-root",
            abs(rho1 - beam) < 1e-8 * beam,
            f"rho_1 = {rho1:.12g} vs {beam:.12g}",
        )
    )

    wdata = weight_numbers(p, 2, data, tol=cfg.tol)
    dev = max(abs(d.beta / (-4.0 * d.lam) - 1.0) for d in wdata)
    checks.append(("weight-identity", dev < 1e-6, f"max |beta/(-4 lambda) - 1| = {dev:.3g}"))

    ac = constants_from_primitives(p)
    r5 = 0.5 * (abs(predict_lambda(3, 5, ac)) + abs(predict_lambda(3, 6, ac)))
    c = count_zeros(p, 3, 0.0, r5, samples=64, tol=cfg.tol)
    checks.append(("zero-count", c == 5, f"count in first shell = {c}"))

    failed = 0
    for name, ok, detail in checks:
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 2


def run(cfg: RunConfig) -> int:
    """Execute one configured command; returns the process exit code."""
    if cfg.command not in ("spectrum", "weights", "predict", "verify", "selfcheck"):
        raise CliInputError(f"unknown command {cfg.command!r}")
    if cfg.command == "selfcheck":
        return _run_selfcheck(cfg)
    if cfg.problem not in (1, 2, 3):
        raise CliInputError(f"problem must be 1, 2 or 3, got {cfg.problem}")
    if cfg.nmax < 1:
        raise CliInputError(f"nmax must be >= 1, got {cfg.nmax}")
    if not (0.0 < cfg.tol <= 1e-4):
        raise CliInputError(f"tol must lie in (0, 1e-4], got {cfg.tol}")
    if cfg.fmt not in ("json", "csv"):
        raise CliInputError(f"format must be json or csv, got {cfg.fmt!r}")
    cs = load_coefficients(cfg.coeffs, cfg.grid)
    p = build_primitives(cs)
    if cfg.command == "predict":
        return _run_predict(cfg, p)
    if cfg.command == "verify":
        return _run_verify(cfg, p)
    return _run_spectrum(cfg, p)


def _build_parser() -> _Parser:
    ap = _Parser(prog="quartspec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("spectrum", "compute eigenvalues"),
        ("weights", "compute eigenvalues and weight numbers"),
        ("predict", "asymptotic main terms only"),
        ("verify", "compare numeric spectrum against predictions"),
        ("selfcheck", "run built-in sanity checks"),
    ):
        sp = sub.add_parser(name, help=blurb)
        if name != "selfcheck":
            sp.add_argument("--problem", type=int, default=3,
                            help="boundary condition index 1, 2 or 3 (default 3)")
            sp.add_argument("--coeffs", default="zero",
                            help="preset name or JSON sample file (default zero)")
            sp.add_argument("--nmax", type=int, default=10,
                            help="number of eigenvalues (default 10)")
            sp.add_argument("--format", dest="fmt", default="json",
                            choices=("json", "csv"), help="output format")
            sp.add_argument("--out", default=None, help="output path (default stdout)")
            sp.add_argument("--grid", type=int, default=DEFAULT_GRID,
                            help="sample grid size for presets")
        sp.add_argument("--tol", type=float, default=1e-10,
                        help="integration tolerance (default 1e-10)")
    return ap


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        cfg = RunConfig(
            command=ns.command,
            problem=getattr(ns, "problem", 3),
            coeffs=getattr(ns, "coeffs", "zero"),
            nmax=getattr(ns, "nmax", 10),
            tol=ns.tol,
            fmt=getattr(ns, "fmt", "json"),
            out=getattr(ns, "out", None),
            grid=getattr(ns, "grid", DEFAULT_GRID),
        )
        return run(cfg)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IntegrationError, CompletenessError, ContourError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
