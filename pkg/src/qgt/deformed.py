"""q-logarithm, q-exponential and Tsallis entropy, for scalars and matrices.

For ``q > 1``::

    log_q(x) = (x**(q-1) - 1) / (q-1)          x > 0
    exp_q(x) = (1 + (q-1) x) ** (1/(q-1))      x > -1/(q-1)

and both reduce to ``log``/``exp`` at ``q = 1``. Near ``q = 1`` the
formulas are evaluated as ``expm1((q-1) ln x) / (q-1)`` and
``exp(log1p((q-1) x) / (q-1))`` to avoid cancellation.
"""
from __future__ import annotations

import math

import numpy as np

from . import config
from .spectral import (
    DomainError,
    PositiveDefiniteMatrix,
    ScalarFunction,
    SymmetricMatrix,
    apply_function,
    as_positive_definite,
    decompose,
    random_pd_array,
    trace_product,
)


def check_q(q: float) -> float:
    """Validate the deformation parameter and return it as a float."""
    q = float(q)
    if not config.Q_MIN <= q <= config.Q_MAX:
        raise ValueError(f"q must lie in [{config.Q_MIN}, {config.Q_MAX}], got {q!r}")
    return q


def _is_one(q):
    return abs(q - 1.0) < config.Q_ONE_CUTOFF


def q_exp_lower_bound(q: float) -> float:
    """Open lower end of the domain of ``exp_q``: ``-1/(q-1)``, or ``-inf`` at q = 1."""
    q = check_q(q)
    return -math.inf if _is_one(q) else -1.0 / (q - 1.0)


def _scalar_or_array(x):
    if np.ndim(x) == 0:
        return float(x), True
    return np.asarray(x, dtype=np.float64), False


def q_log(x, q: float):
    """Deformed logarithm; accepts scalars or arrays of positive numbers."""
    q = check_q(q)
    x, scalar = _scalar_or_array(x)
    if not np.all(np.asarray(x) > 0.0):
        raise DomainError(f"q_log needs x > 0, got min {np.min(x)!r}", np.min(x), 0.0)
    if _is_one(q):
        out = np.log(x)
    else:
        out = np.expm1((q - 1.0) * np.log(x)) / (q - 1.0)
    return float(out) if scalar else out


def q_exp(x, q: float):
    """Deformed exponential, inverse of :func:`q_log`."""
    q = check_q(q)
    x, scalar = _scalar_or_array(x)
    if _is_one(q):
        out = np.exp(x)
    else:
        bound = -1.0 / (q - 1.0)
        if not np.all(np.asarray(x) > bound):
            lo = float(np.min(x))
            raise DomainError(f"q_exp needs x > {bound!r}, got {lo!r}", lo, bound)
        out = np.exp(np.log1p((q - 1.0) * x) / (q - 1.0))
    return float(out) if scalar else out


def q_log_derivative(x, q: float):
    """``d/dx log_q(x) = x**(q-2)``."""
    q = check_q(q)
    x, scalar = _scalar_or_array(x)
    if not np.all(np.asarray(x) > 0.0):
        raise DomainError("q_log_derivative needs x > 0", np.min(x), 0.0)
    out = np.power(x, q - 2.0)
    return float(out) if scalar else out


def q_exp_derivative(x, q: float):
    """``d/dx exp_q(x) = exp_q(x)**(2-q)``."""
    q = check_q(q)
    out = np.power(q_exp(x, q), 2.0 - q)
    return float(out) if np.ndim(out) == 0 else out


def q_log_function(q: float) -> ScalarFunction:
    q = check_q(q)
    return ScalarFunction(
        lambda x: q_log(x, q), lambda x: q_log_derivative(x, q), 0.0, f"log_{q:g}"
    )


def q_exp_function(q: float) -> ScalarFunction:
    q = check_q(q)
    return ScalarFunction(
        lambda x: q_exp(x, q), lambda x: q_exp_derivative(x, q), q_exp_lower_bound(q), f"exp_{q:g}"
    )


def power_function(p: float) -> ScalarFunction:
    """``x -> x**p`` on the positive half-line."""
    p = float(p)
    return ScalarFunction(
        lambda x: np.power(x, p), lambda x: p * np.power(x, p - 1.0), 0.0, f"x^{p:g}"
    )


def matrix_q_log(a, q: float) -> SymmetricMatrix:
    """Spectral ``log_q`` of a positive definite matrix."""
    return apply_function(as_positive_definite(a), q_log_function(q))


def matrix_q_exp(x, q: float) -> PositiveDefiniteMatrix:
    """Spectral ``exp_q``; every eigenvalue of ``x`` must exceed ``-1/(q-1)``."""
    out = apply_function(x, q_exp_function(q))
    return PositiveDefiniteMatrix(out.array, out.decomposition)


def matrix_power(a, p: float) -> PositiveDefiniteMatrix:
    out = apply_function(as_positive_definite(a), power_function(p))
    return PositiveDefiniteMatrix(out.array, out.decomposition)


class DensityMatrix(PositiveDefiniteMatrix):
    """Positive definite matrix of unit trace."""

    __slots__ = ()

    def __init__(self, entries, decomposition=None):
        super().__init__(entries, decomposition)
        tr = float(np.trace(self.array))
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"density matrix must have unit trace, got {tr!r}")

    @classmethod
    def from_spectrum(cls, eigenvalues, basis=None):
        """Build ``basis @ diag(p) @ basis.T`` with ``p`` the normalized eigenvalues."""
        w = np.asarray(eigenvalues, dtype=np.float64)
        w = w / math.fsum(w)
        if basis is None:
            return cls(np.diag(w))
        m = (basis * w) @ basis.T
        m = 0.5 * (m + m.T)
        return cls(m / np.trace(m))


def random_density_array(rng: np.random.Generator, dim: int, eigenvalue_range=(0.01, 1.0)):
    m = random_pd_array(rng, dim, eigenvalue_range)
    return m / np.trace(m)


def _spectrum(rho) -> np.ndarray:
    return decompose(rho).eigenvalues


def tsallis_entropy(rho, q: float) -> float:
    """``(1 - Tr rho**q) / (q-1)``; von Neumann entropy at q = 1."""
    q = check_q(q)
    w = _spectrum(rho)
    if not w[0] > 0.0:
        raise DomainError("density matrix must be positive definite", float(w[0]), 0.0)
    if _is_one(q):
        return von_neumann_entropy(rho)
    return (1.0 - math.fsum(np.power(w, q))) / (q - 1.0)


def tsallis_entropy_trace_form(rho, q: float) -> float:
    """``-Tr rho log_q(rho)``, assembled from the matrix q-logarithm."""
    return -trace_product(rho, matrix_q_log(rho, q))


def von_neumann_entropy(rho) -> float:
    w = _spectrum(rho)
    return -math.fsum(w * np.log(w))
