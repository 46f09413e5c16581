"""Quick cross-checks of the numerical machinery against independent oracles."""
from __future__ import annotations

import itertools
import math

import numpy as np

from . import config
from ._backend import available_backends, load_backend
from .deformed import (
    matrix_q_exp,
    matrix_q_log,
    matrix_power,
    power_function,
    q_exp,
    q_exp_derivative,
    q_exp_function,
    q_log,
    q_log_derivative,
    q_log_function,
)
from .frechet import central_difference, frechet, trace_derivative_identity_check
from .functionals import make_isometry_family, phi, phi_derivative
from .inequalities import theorem1_sides
from .spectral import random_pd_array


def scalar_exp_q(x, q):
    if q == 1.0:
        return math.exp(x)
    return (x * (q - 1.0) + 1.0) ** (1.0 / (q - 1.0))


def scalar_theorem1(a, b, q):
    """Both sides of the deformed Golden-Thompson inequality for 1x1 matrices."""
    lhs = scalar_exp_q(a + b, q)
    rhs = scalar_exp_q(a, q) ** (2.0 - q) * (a * (q - 1.0) + scalar_exp_q(b, q))
    return lhs, rhs


def scalar_grid():
    """100 ``(a, b, q)`` points: 4 x 5 x 5."""
    return list(itertools.product((0.05, 0.5, 1.0, 7.5),
                                  (0.1, 0.8, 2.0, 5.0, 19.0),
                                  (1.0, 1.3, 2.0, 2.4, 3.0)))


def check_scalar_oracle():
    worst = 0.0
    for a, b, q in scalar_grid():
        lhs, rhs = theorem1_sides([[a]], [[b]], q)
        olhs, orhs = scalar_theorem1(a, b, q)
        worst = max(worst, abs(lhs - olhs) / abs(olhs), abs(rhs - orhs) / abs(orhs))
    return worst <= 1e-12, f"max relative deviation {worst:.2e} (tol 1e-12)"


def check_worked_point():
    lhs, rhs = theorem1_sides([[1.0]], [[1.0]], 1.5)
    return (lhs == 4.0 and rhs == 4.125), f"lhs={lhs!r} rhs={rhs!r} (expected 4, 4.125)"


def check_scalar_derivatives():
    h = config.FD_STEP
    worst = 0.0
    for q in (1.0, 1.2, 1.5, 2.0, 2.5, 3.0):
        for x in (0.1, 0.5, 1.0, 3.0, 10.0):
            fd = (q_log(x + h, q) - q_log(x - h, q)) / (2 * h)
            worst = max(worst, abs(fd - q_log_derivative(x, q)) / abs(fd))
            fd = (q_exp(x + h, q) - q_exp(x - h, q)) / (2 * h)
            worst = max(worst, abs(fd - q_exp_derivative(x, q)) / abs(fd))
    return worst <= 1e-6, f"max relative deviation {worst:.2e} (tol 1e-6)"


def check_frechet(seed=0, trials=20):
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(trials):
        dim = int(rng.integers(2, 7))
        q = float(rng.choice([1.2, 1.5, 2.0, 2.5, 3.0]))
        a = random_pd_array(rng, dim, (0.1, 10.0))
        b = rng.standard_normal((dim, dim))
        b = b + b.T
        for fn, mat in ((q_exp_function(q), lambda m: matrix_q_exp(m, q)),
                        (q_log_function(q), lambda m: matrix_q_log(m, q)),
                        (power_function(q - 1.0), lambda m: matrix_power(m, q - 1.0))):
            fd = central_difference(mat, a, b)
            exact = frechet(a, fn, b).array
            worst = max(worst, np.max(np.abs(exact - fd)) / max(np.max(np.abs(fd)), 1e-300))
    return worst <= 1e-6, f"max relative deviation {worst:.2e} (tol 1e-6)"


def check_trace_identity(seed=1, trials=20):
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(trials):
        dim = int(rng.integers(2, 7))
        q = float(rng.uniform(1.0, 3.0))
        a = random_pd_array(rng, dim, (0.1, 10.0))
        b = rng.standard_normal((dim, dim))
        b = b + b.T
        for fn in (q_exp_function(q), q_log_function(q)):
            res = trace_derivative_identity_check(a, fn, b)
            deriv = np.asarray(fn.derivative(np.linalg.eigvalsh(a)))
            scale = max(1.0, float(np.sum(np.abs(deriv))) * float(np.max(np.abs(b))))
            worst = max(worst, res / scale)
    return worst <= 1e-9, f"max scaled residual {worst:.2e} (tol 1e-9)"


def check_phi_derivative(seed=2, trials=10):
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    h = config.FD_STEP
    for _ in range(trials):
        dim = int(rng.integers(1, 5))
        k = int(rng.integers(1, 4))
        q = float(rng.uniform(1.0, 3.0))
        fam = make_isometry_family(k, dim, int(rng.integers(0, 2**63)))
        x = [random_pd_array(rng, dim, (0.1, 10.0)) for _ in range(k)]
        d = [random_pd_array(rng, dim, (0.1, 10.0)) for _ in range(k)]
        exact = phi_derivative(fam, x, d, q)
        up = phi(fam, [a + h * b for a, b in zip(x, d)], q)
        down = phi(fam, [a - h * b for a, b in zip(x, d)], q)
        fd = (up - down) / (2 * h)
        worst = max(worst, abs(exact - fd) / max(1.0, abs(fd)))
    return worst <= 1e-6, f"max relative deviation {worst:.2e} (tol 1e-6)"


def check_backends(seed=3, trials=20):
    names = available_backends()
    if len(names) < 2:
        return True, f"only {names} available; skipped"
    mods = [load_backend(n) for n in names]
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(trials):
        dim = int(rng.integers(1, 12))
        m = rng.standard_normal((dim, dim))
        m = m + m.T
        ws = [mod.jacobi_eigh(m, config.JACOBI_REL_TOL, config.JACOBI_MAX_SWEEPS)[0]
              for mod in mods]
        worst = max(worst, float(np.max(np.abs(ws[0] - ws[1]))) / max(1.0, np.max(np.abs(m))))
    return worst <= 1e-12, f"eigenvalue deviation between {names}: {worst:.2e}"


CHECKS = (
    ("scalar oracle (dim 1, 100-point grid)", check_scalar_oracle),
    ("worked point a=b=1, q=1.5", check_worked_point),
    ("q_log/q_exp derivative identities vs finite differences", check_scalar_derivatives),
    ("Frechet derivative vs finite differences", check_frechet),
    ("trace derivative identity", check_trace_identity),
    ("phi chain-rule derivative vs finite differences", check_phi_derivative),
    ("compiled vs python kernels", check_backends),
)


def run_selftest():
    """Run every check; returns ``[(name, passed, detail), ...]``."""
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the remaining checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
