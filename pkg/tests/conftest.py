import sys

import numpy as np
import pytest

from quartspec.coefficients import CoefficientSet, build_primitives, preset_set
from quartspec.spectral import find_eigenvalues, weight_numbers


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance pass/fail lines where capture cannot hide them."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def _make_primitives(name):
    if name == "mixed-adjoint":
        base = preset_set("mixed")
        cs = CoefficientSet(tau2=base.tau2, tau1=-base.tau1, r0=base.r0)
        return build_primitives(cs)
    return build_primitives(preset_set(name))


@pytest.fixture(scope="session")
def prims():
    """Primitive tables per preset name, built once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = _make_primitives(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def spectra(prims):
    """Eigenvalue lists per (preset, k), grown on demand and sliced."""
    cache = {}

    def get(name, k, nmax):
        have = cache.get((name, k))
        if have is None or len(have) < nmax:
            have = find_eigenvalues(prims(name), k, nmax)
            cache[(name, k)] = have
        return have[:nmax]

    return get


@pytest.fixture(scope="session")
def weighted(prims, spectra):
    """Weight-number lists per (preset, k), reusing cached spectra."""
    cache = {}

    def get(name, k, nmax):
        have = cache.get((name, k))
        if have is None or len(have) < nmax:
            have = weight_numbers(prims(name), k, spectra(name, k, nmax))
            cache[(name, k)] = have
        return have[:nmax]

    return get
