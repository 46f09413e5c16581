"""Checkers for the deformed Golden-Thompson inequalities and their ingredients.

Every checker returns an :class:`InequalityVerdict` whose ``gap`` is oriented
so that the claimed inequality holds exactly when ``gap >= -tol``, with
``tol = tol_scale * max(1, |lhs|, |rhs|)``. Claims that flip direction at
``q = 2`` put ``q = 2`` in the upper branch, where both sides coincide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .deformed import check_q, matrix_q_exp, q_exp, q_exp_function
from .functionals import (
    IsometryFamily,
    as_point,
    combine_points,
    phi,
    phi_derivative,
    phi_derivative_trace_form,
)
from .spectral import (
    SymmetricMatrix,
    apply_function,
    as_array,
    as_positive_definite,
    as_symmetric,
    decompose,
    trace_product,
)

LE = "le"   # claim: lhs <= rhs
GE = "ge"   # claim: lhs >= rhs
EQ = "eq"   # claim: lhs == rhs


@dataclass(frozen=True)
class InequalityVerdict:
    lhs: float
    rhs: float
    gap: float
    relative_margin: float
    holds: bool
    tol: float
    scale: float
    claim: str = LE
    details: dict = field(default_factory=dict, compare=False)


def verdict(lhs: float, rhs: float, claim: str, tol_scale: float = config.TOL_SCALE,
            details: dict | None = None, scale: float | None = None) -> InequalityVerdict:
    """Orient ``lhs`` vs ``rhs`` by ``claim`` and apply the scale-aware tolerance.

    ``scale`` defaults to ``max(1, |lhs|, |rhs|)``.
    """
    lhs = float(lhs)
    rhs = float(rhs)
    if claim == LE:
        gap = rhs - lhs
    elif claim == GE:
        gap = lhs - rhs
    elif claim == EQ:
        gap = -abs(lhs - rhs)
    else:
        raise ValueError(f"unknown claim {claim!r}")
    if scale is None:
        scale = max(1.0, abs(lhs), abs(rhs))
    tol = tol_scale * scale
    holds = bool(gap >= -tol)
    return InequalityVerdict(lhs, rhs, gap, gap / scale, holds, tol, scale, claim,
                             dict(details or {}))


def branch_claim(q: float, lower_branch: str) -> str:
    """Claim direction for ``1 <= q < 2``, mirrored for ``2 <= q <= 3``."""
    if q < 2.0:
        return lower_branch
    return GE if lower_branch == LE else LE


def _trace_q_exp(x, q):
    return math.fsum(q_exp(decompose(x).eigenvalues, q))


def _q_exp_weight(a, q):
    """``exp_q(A)**(2-q)`` as a matrix."""
    return apply_function(a, lambda w: np.power(q_exp(w, q), 2.0 - q),
                          lower=q_exp_function(q).lower)


def theorem1_sides(a, b, q: float) -> tuple[float, float]:
    """``(Tr exp_q(A+B), Tr exp_q(A)**(2-q) (A(q-1) + exp_q(B)))``."""
    q = check_q(q)
    a = as_positive_definite(a)
    b = as_positive_definite(b)
    lhs = _trace_q_exp(a.array + b.array, q)
    inner = (q - 1.0) * a.array + matrix_q_exp(b, q).array
    rhs = trace_product(_q_exp_weight(a, q), inner)
    return lhs, rhs


def check_theorem1(a, b, q: float, tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """Deformed Golden-Thompson: ``<=`` for ``1 <= q < 2``, ``>=`` for ``2 <= q <= 3``."""
    q = check_q(q)
    lhs, rhs = theorem1_sides(a, b, q)
    return verdict(lhs, rhs, branch_claim(q, LE), tol_scale)


def check_classical_gt(a, b, tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """``Tr exp(A+B) <= Tr exp(A) exp(B)`` for arbitrary symmetric ``A``, ``B``."""
    a = as_symmetric(a)
    b = as_symmetric(b)
    lhs = math.fsum(np.exp(decompose(a.array + b.array).eigenvalues))
    rhs = trace_product(apply_function(a, np.exp), apply_function(b, np.exp))
    return verdict(lhs, rhs, LE, tol_scale)


def check_differential_inequality(family: IsometryFamily, point_x, point_h, q: float,
                                  tol_scale: float = config.TOL_SCALE,
                                  cross_check: bool = True) -> InequalityVerdict:
    """``d phi(x) h >= phi(h)`` for ``1 <= q < 2``, ``<=`` for ``2 <= q <= 3``.

    With ``cross_check`` the chain-rule derivative is compared against a
    central difference of ``t -> phi(x + t h)``; the estimate and its relative
    deviation land in ``details``.
    """
    q = check_q(q)
    x = as_point(point_x)
    h = as_point(point_h)
    lhs = phi_derivative(family, x, h, q)
    rhs = phi(family, h, q)
    details = {}
    if cross_check:
        step = config.FD_STEP
        up = phi(family, _shift(x, h, step), q)
        down = phi(family, _shift(x, h, -step), q)
        fd = (up - down) / (2.0 * step)
        details = {"fd_derivative": fd,
                   "fd_relative_error": abs(fd - lhs) / max(1.0, abs(lhs))}
    return verdict(lhs, rhs, branch_claim(q, GE), tol_scale, details)


def _shift(x, h, t):
    return as_point([as_array(a) + t * as_array(b) for a, b in zip(x, h)])


def check_corollary6(family: IsometryFamily, points_a, points_b, q: float,
                     tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """``phi(B) <= Tr exp_q(X)**(2-q) sum_j H_j.T (d log_q(A_j) B_j) H_j`` (``>=`` for q >= 2)."""
    q = check_q(q)
    a = as_point(points_a)
    b = as_point(points_b)
    lhs = phi(family, b, q)
    rhs = phi_derivative_trace_form(family, a, b, q)
    return verdict(lhs, rhs, branch_claim(q, LE), tol_scale)


def _check_eps(eps):
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps!r}")
    return eps


def decoupled_rhs(L1, L2, q: float, eps: float) -> float:
    """``Tr exp_q(L1)**(2-q) (L1(q-1) + eps + (1-eps) exp_q(L2/(1-eps)))``."""
    q = check_q(q)
    eps = _check_eps(eps)
    L1 = as_positive_definite(L1)
    L2 = as_positive_definite(L2)
    n = L1.dim
    inner = ((q - 1.0) * L1.array + eps * np.eye(n)
             + (1.0 - eps) * matrix_q_exp(L2.array / (1.0 - eps), q).array)
    return trace_product(_q_exp_weight(L1, q), inner)


def decoupled_bound(L1, L2, q: float, eps: float,
                    tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """Decoupled bound ``Tr exp_q(L1 + L2)`` vs :func:`decoupled_rhs` at ``eps``."""
    q = check_q(q)
    L1 = as_positive_definite(L1)
    L2 = as_positive_definite(L2)
    lhs = _trace_q_exp(L1.array + L2.array, q)
    rhs = decoupled_rhs(L1, L2, q, eps)
    return verdict(lhs, rhs, branch_claim(q, LE), tol_scale, {"eps": float(eps)})


def decoupling_profile(L1, L2, q: float, eps_grid) -> dict:
    """Evaluate :func:`decoupled_rhs` on ``eps_grid`` and report its monotonicity.

    ``direction`` is ``"increasing"``, ``"decreasing"``, ``"constant"`` or
    ``"mixed"`` along increasing ``eps``.
    """
    grid = sorted(_check_eps(e) for e in eps_grid)
    values = [decoupled_rhs(L1, L2, q, e) for e in grid]
    steps = np.diff(values)
    scale = max(1.0, max(abs(v) for v in values))
    flat = np.abs(steps) <= 1e-12 * scale
    if np.all(flat):
        direction = "constant"
    elif np.all(steps[~flat] > 0):
        direction = "increasing"
    elif np.all(steps[~flat] < 0):
        direction = "decreasing"
    else:
        direction = "mixed"
    return {"eps": grid, "rhs": values, "direction": direction}


def decoupling_term(L2, q: float, eps: float) -> SymmetricMatrix:
    """``(1-eps) exp_q(L2/(1-eps))``."""
    eps = _check_eps(eps)
    L2 = as_positive_definite(L2)
    return SymmetricMatrix((1.0 - eps) * matrix_q_exp(L2.array / (1.0 - eps), q).array)


@dataclass(frozen=True)
class LimitCheck:
    eps: tuple
    deviations: tuple
    monotone: bool
    slope: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def decoupling_limit_check(L2, q: float, eps_grid) -> LimitCheck:
    """Max-norm distance of ``(1-eps) exp_q(L2/(1-eps))`` from ``exp_q(L2)`` along ``eps_grid``.

    ``slope`` is the least-squares log-log slope of deviation against eps
    (1 for linear convergence); ``monotone`` says the deviations shrink
    along the grid, which must run toward zero.
    """
    eps = [_check_eps(e) for e in eps_grid]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_grid must be strictly decreasing")
    L2 = as_positive_definite(L2)
    target = matrix_q_exp(L2, q).array
    devs = [float(np.max(np.abs(decoupling_term(L2, q, e).array - target))) for e in eps]
    monotone = all(b < a for a, b in zip(devs, devs[1:]))
    if len(eps) >= 2 and all(d > 0 for d in devs):
        slope = float(np.polyfit(np.log(eps), np.log(devs), 1)[0])
    else:
        slope = math.nan
    return LimitCheck(tuple(eps), tuple(devs), monotone, slope)


def convexity_probe(func, x, y, concave: bool, lambdas,
                    tol_scale: float = config.TOL_SCALE) -> InequalityVerdict:
    """Segment probe of concavity (or convexity) of ``func`` between points ``x`` and ``y``.

    For each ``lam`` compares ``func(lam x + (1-lam) y)`` with
    ``lam func(x) + (1-lam) func(y)`` and returns the worst verdict; the
    offending ``lam`` is in ``details``.
    """
    fx = func(x)
    fy = func(y)
    scale = max(1.0, abs(fx), abs(fy))
    worst = None
    for lam in lambdas:
        chord = lam * fx + (1.0 - lam) * fy
        value = func(combine_points(x, y, lam))
        v = verdict(chord, value, LE if concave else GE, tol_scale,
                    {"lambda": float(lam)}, scale=scale)
        if worst is None or v.relative_margin < worst.relative_margin:
            worst = v
    return worst
