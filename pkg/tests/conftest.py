"""Shared fixtures: heavy solves are computed once per session and reused.

The expensive objects here (Green models, rho estimates, bounds records,
construction runs) are deterministic, so sharing them across test modules
changes nothing about what is asserted while keeping the suite fast.
"""

import json
import shutil
import subprocess
import sys
import time

import pytest

from convfactor.classify import compute_bounds
from convfactor.construct import construct_step
from convfactor.geometry import Disk, Polygon, geometry_to_dict, validate_set
from convfactor.minimax import (
    PiecewiseTarget,
    Polynomial,
    deviation_sequence,
    estimate_rho_deviation,
    target_independence_check,
)
from convfactor.potential import estimate_rho_green, solve_green
from convfactor.presets import (
    HEX_VERTICES,
    preset_ex31,
    preset_ex32,
    preset_ex33,
)

CONVFACTOR_BIN = shutil.which("convfactor")


def run_cli(args, timeout=600):
    """Run the installed CLI in a fresh process; returns CompletedProcess."""
    cmd = ([CONVFACTOR_BIN] if CONVFACTOR_BIN
           else [sys.executable, "-m", "convfactor.cli"])
    return subprocess.run(cmd + list(args), capture_output=True,
                          timeout=timeout)


@pytest.fixture(scope="session")
def cli():
    return run_cli


# ---------------------------------------------------------------------------
# scenario geometries


@pytest.fixture(scope="session")
def ex31():
    return preset_ex31(18.0)


@pytest.fixture(scope="session")
def ex31_L(ex31):
    return ex31.L


@pytest.fixture(scope="session")
def ex32():
    return preset_ex32(0.5, 9)


@pytest.fixture(scope="session")
def ex33():
    return preset_ex33()


@pytest.fixture(scope="session")
def ex33_L(ex33):
    return ex33.L


@pytest.fixture(scope="session")
def disk_hex_L():
    """Unit disk K0 next to the hexagon: the third chain-check geometry."""
    return validate_set([Disk(0j, 1.0), Polygon(HEX_VERTICES)])


@pytest.fixture(scope="session")
def geom_files(tmp_path_factory, ex31_L, ex33_L):
    """Geometry JSON files for CLI runs, written once."""
    d = tmp_path_factory.mktemp("geometries")
    paths = {}
    for name, L in (("ex31", ex31_L), ("ex33", ex33_L)):
        p = d / f"{name}.json"
        p.write_text(json.dumps(geometry_to_dict(L)))
        paths[name] = str(p)
    return paths


# ---------------------------------------------------------------------------
# Green models


@pytest.fixture(scope="session")
def ex31_model(ex31_L):
    return solve_green(list(ex31_L.components))


@pytest.fixture(scope="session")
def ex33_model(ex33_L):
    return solve_green(list(ex33_L.components))


# ---------------------------------------------------------------------------
# rho estimates (both routes)


@pytest.fixture(scope="session")
def ex31_green_rho(ex31_L):
    return estimate_rho_green(ex31_L)


@pytest.fixture(scope="session")
def ex33_green_rho(ex33_L):
    t0 = time.perf_counter()
    est = estimate_rho_green(ex33_L)
    est.diagnostics["elapsed_s"] = time.perf_counter() - t0
    return est


@pytest.fixture(scope="session")
def ex33_dev_rho(ex33_L):
    t0 = time.perf_counter()
    est = estimate_rho_deviation(ex33_L)
    est.diagnostics["elapsed_s"] = time.perf_counter() - t0
    return est


@pytest.fixture(scope="session")
def ex31_records(ex31_L):
    """Deviation records for n = 1..40 on the two-disk set, target (0, 1)."""
    target = PiecewiseTarget.constants([0.0, 1.0])
    return deviation_sequence(ex31_L, target, n_min=1, n_max=40)


@pytest.fixture(scope="session")
def ex31_independence(ex31_L):
    """Rho estimates from three targets, including a non-constant pair."""
    targets = [
        PiecewiseTarget.constants([0.0, 1.0]),
        PiecewiseTarget.constants([1.0, 0.0]),
        PiecewiseTarget((Polynomial(0j, (0j, 1.0 + 0j)),
                         Polynomial(0j, (1.0 + 0j, 2.0 + 0j)))),
    ]
    return target_independence_check(ex31_L, targets)


# ---------------------------------------------------------------------------
# bounds records (classification inputs)


@pytest.fixture(scope="session")
def ex31_bounds(ex31_L):
    return compute_bounds(ex31_L, 0j)


@pytest.fixture(scope="session")
def ex32_bounds(ex32):
    return compute_bounds(ex32.L, 0j)


@pytest.fixture(scope="session")
def disk_hex_bounds(disk_hex_L):
    return compute_bounds(disk_hex_L, 0j)


# ---------------------------------------------------------------------------
# construction


@pytest.fixture(scope="session")
def ex31_step(ex31_L, ex31_green_rho):
    """The universality step on the two-disk set: p0 = 0, u = 1, lambda = 2."""
    p0 = Polynomial(0j, (0j,))
    u = Polynomial(0j, (1.0 + 0j,))
    return construct_step(ex31_L, 0j, p0, u, eps0=0.1, s0=10, lam=2.0,
                          rho=ex31_green_rho)
