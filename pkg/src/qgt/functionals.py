"""Trace functionals built from the deformed logarithm and exponential.

The central object is::

    phi(A_1, ..., A_k) = Tr exp_q( sum_i H_i.T log_q(A_i) H_i )

for a family with ``sum_i H_i.T H_i = I``. For ``q > 1`` it equals the
closed form ``Tr (sum_i H_i.T A_i**(q-1) H_i) ** (1/(q-1))``, i.e. the
Carlen-Lieb functional with exponent ``p = q - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .deformed import (
    check_q,
    matrix_power,
    matrix_q_exp,
    matrix_q_log,
    q_exp,
    q_exp_function,
    q_log_function,
)
from .frechet import frechet
from .spectral import (
    DomainError,
    PositiveDefiniteMatrix,
    SymmetricMatrix,
    apply_function,
    as_array,
    as_positive_definite,
    decompose,
    trace_product,
)

EXACT = "exact"
SUB = "sub"


@dataclass(frozen=True)
class IsometryFamily:
    """Matrices ``H_1..H_k`` with ``sum H_i.T H_i == I`` (exact) or ``<= I`` (sub)."""

    members: tuple
    completeness: str = EXACT

    def __post_init__(self):
        members = tuple(np.array(h, dtype=np.float64) for h in self.members)
        if not members:
            raise ValueError("an isometry family needs at least one member")
        n = members[0].shape[0]
        for h in members:
            if h.shape != (n, n):
                raise ValueError("family members must share one square shape")
            h.setflags(write=False)
        object.__setattr__(self, "members", members)
        gram = self.gram()
        if self.completeness == EXACT:
            err = float(np.max(np.abs(gram - np.eye(n))))
            if err > 1e-10:
                raise ValueError(f"sum of H_i^T H_i deviates from I by {err:.3e}")
        elif self.completeness == SUB:
            top = float(decompose(gram).eigenvalues[-1])
            if top > 1.0 + 1e-10:
                raise ValueError(f"sum of H_i^T H_i has eigenvalue {top!r} > 1")
        else:
            raise ValueError(f"completeness must be {EXACT!r} or {SUB!r}")

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    def gram(self) -> np.ndarray:
        return sum(h.T @ h for h in self.members)

    def sandwich(self, mats) -> np.ndarray:
        """``sum_i H_i.T M_i H_i``."""
        return sum(h.T @ as_array(m) @ h for h, m in zip(self.members, mats))


def _normalize(members, gram):
    dec = decompose(gram)
    inv_sqrt = dec.reconstruct(1.0 / np.sqrt(dec.eigenvalues))
    return [h @ inv_sqrt for h in members]


def make_isometry_family(k: int, dim: int, seed: int, completeness: str = EXACT,
                         scale: float | None = None) -> IsometryFamily:
    """Seeded family ``H_i = G_i S^{-1/2}``, ``S = sum G_i.T G_i``, ``G_i`` Gaussian.

    ``completeness="sub"`` multiplies an exact family by ``scale`` (drawn
    uniformly from (0.05, 0.95) when not given), so the Gram sum is
    ``scale**2 * I``.
    """
    if not 1 <= k <= config.MAX_FAMILY_SIZE:
        raise ValueError(f"k must be in [1, {config.MAX_FAMILY_SIZE}]")
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(config.MAX_FAMILY_RETRIES):
        g = rng.standard_normal((k, dim, dim))
        s = np.einsum("kji,kjl->il", g, g)
        w = decompose(s).eigenvalues
        if not w[0] > 0.0 or w[-1] / w[0] > config.MAX_GRAM_CONDITION:
            continue
        members = _normalize(list(g), s)
        # One more pass on the (now well-conditioned) Gram sum removes the
        # cond(S) * eps residual of the first.
        members = _normalize(members, sum(h.T @ h for h in members))
        break
    else:
        raise RuntimeError(f"no well-conditioned family after {config.MAX_FAMILY_RETRIES} draws")
    if completeness == EXACT:
        return IsometryFamily(tuple(members), EXACT)
    if completeness != SUB:
        raise ValueError(f"completeness must be {EXACT!r} or {SUB!r}")
    if scale is None:
        scale = float(rng.uniform(0.05, 0.95))
    if not 0.0 < scale < 1.0:
        raise ValueError("scale must lie in (0, 1)")
    return IsometryFamily(tuple(scale * h for h in members), SUB)


def as_point(mats: Sequence) -> tuple[PositiveDefiniteMatrix, ...]:
    """Validate a k-tuple of positive definite matrices of one dimension."""
    point = tuple(as_positive_definite(m) for m in mats)
    if not point:
        raise ValueError("a point needs at least one matrix")
    if len({m.dim for m in point}) != 1:
        raise ValueError("all matrices of a point must share one dimension")
    return point


def _check(family: IsometryFamily, point, need_exact=True):
    if need_exact and family.completeness != EXACT:
        raise ValueError("phi needs an exact family (sum H_i^T H_i = I)")
    if len(point) != family.k:
        raise ValueError(f"point has {len(point)} matrices, family has {family.k}")
    if point[0].dim != family.dim:
        raise ValueError("point and family dimensions differ")


def log_aggregate(family: IsometryFamily, point, q: float) -> np.ndarray:
    """``sum_i H_i.T log_q(A_i) H_i``."""
    return family.sandwich([matrix_q_log(a, q) for a in point])


def _trace_q_exp(x, q: float) -> float:
    w = decompose(x).eigenvalues
    return math.fsum(q_exp(w, q))


def phi(family: IsometryFamily, point, q: float) -> float:
    """``Tr exp_q(sum_i H_i.T log_q(A_i) H_i)`` for an exact family."""
    q = check_q(q)
    point = as_point(point)
    _check(family, point)
    return _trace_q_exp(log_aggregate(family, point, q), q)


def phi_closed_form(family: IsometryFamily, point, q: float) -> float:
    """``Tr (sum_i H_i.T A_i**(q-1) H_i)**(1/(q-1))``; the log/exp form at q = 1."""
    q = check_q(q)
    point = as_point(point)
    _check(family, point)
    if q == 1.0:
        return _trace_q_exp(log_aggregate(family, point, 1.0), 1.0)
    inner = family.sandwich([matrix_power(a, q - 1.0) for a in point])
    w = decompose(inner).eigenvalues
    return math.fsum(np.power(w, 1.0 / (q - 1.0)))


def phi_with_L(family: IsometryFamily, L, point, q: float) -> float:
    """``Tr exp_q(L + sum_i H_i.T log_q(A_i) H_i)`` with ``sum H_i.T H_i <= I``."""
    q = check_q(q)
    L = as_positive_definite(L)
    point = as_point(point)
    _check(family, point, need_exact=False)
    if L.dim != family.dim:
        raise ValueError("L and family dimensions differ")
    return _trace_q_exp(L.array + log_aggregate(family, point, q), q)


def augment_family(family: IsometryFamily, L, point, q: float):
    """Absorb ``L`` into one extra family member and argument.

    Returns an exact family of size ``k+1`` with ``H_{k+1} = (I - sum H_i.T H_i)^{1/2}``
    and the point extended by ``A_{k+1} = exp_q(H_{k+1}^{-1} L H_{k+1}^{-1})``,
    so that ``phi`` on the result equals ``phi_with_L`` on the input.
    """
    q = check_q(q)
    L = as_positive_definite(L)
    point = as_point(point)
    rest = np.eye(family.dim) - family.gram()
    dec = decompose(rest)
    if not dec.eigenvalues[0] > 0.0:
        raise DomainError("sum H_i^T H_i must be strictly below I to augment",
                          float(dec.eigenvalues[0]), 0.0)
    h_extra = dec.reconstruct(np.sqrt(dec.eigenvalues))
    h_inv = dec.reconstruct(1.0 / np.sqrt(dec.eigenvalues))
    a_extra = matrix_q_exp(h_inv @ L.array @ h_inv, q)
    extended = IsometryFamily(family.members + (h_extra,), EXACT)
    return extended, point + (a_extra,)


def carlen_lieb(members, point, p: float) -> float:
    """``Tr (sum_i H_i.T A_i**p H_i)**(1/p)`` for arbitrary square ``H_i``, ``0 < p <= 2``."""
    p = float(p)
    if not 0.0 < p <= 2.0:
        raise ValueError(f"p must lie in (0, 2], got {p!r}")
    if isinstance(members, IsometryFamily):
        members = members.members
    point = as_point(point)
    if len(members) != len(point):
        raise ValueError("members and point lengths differ")
    inner = sum(np.asarray(h).T @ matrix_power(a, p).array @ np.asarray(h)
                for h, a in zip(members, point))
    w = decompose(inner).eigenvalues
    top = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -1e-12 * top:
        raise DomainError(f"inner sum is not positive semidefinite (eigenvalue {w[0]!r})",
                          float(w[0]), 0.0)
    if not w[-1] > 0.0:
        raise DomainError("inner sum has zero trace", float(w[-1]), 0.0)
    return math.fsum(np.power(np.clip(w, 0.0, None), 1.0 / p))


def phi_derivative(family: IsometryFamily, x, h, q: float) -> float:
    """``d phi(x) h`` by the chain rule: d log_q at each ``A_i``, then d exp_q."""
    q = check_q(q)
    x = as_point(x)
    h = as_point(h)
    _check(family, x)
    _check(family, h)
    log_q = q_log_function(q)
    agg = log_aggregate(family, x, q)
    direction = family.sandwich([frechet(a, log_q, b) for a, b in zip(x, h)])
    return float(np.trace(frechet(agg, q_exp_function(q), direction).array))


def phi_derivative_trace_form(family: IsometryFamily, x, h, q: float) -> float:
    """``Tr exp_q(X)**(2-q) sum_j H_j.T (d log_q(A_j) B_j) H_j`` with ``X`` the log aggregate."""
    q = check_q(q)
    x = as_point(x)
    h = as_point(h)
    _check(family, x)
    _check(family, h)
    log_q = q_log_function(q)
    agg = SymmetricMatrix(log_aggregate(family, x, q))
    weight = apply_function(agg, lambda w: np.power(q_exp(w, q), 2.0 - q),
                            lower=q_exp_function(q).lower)
    direction = family.sandwich([frechet(a, log_q, b) for a, b in zip(x, h)])
    return trace_product(weight, direction)


def scale_point(point, t: float):
    return tuple(PositiveDefiniteMatrix(t * as_array(a)) for a in point)


def combine_points(x, y, lam: float):
    """``lam * x + (1 - lam) * y`` member-wise."""
    return tuple(
        PositiveDefiniteMatrix(lam * as_array(a) + (1.0 - lam) * as_array(b))
        for a, b in zip(x, y)
    )
