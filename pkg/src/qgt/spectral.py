"""Dense real symmetric matrices, their spectral decomposition and matrix functions.

Every matrix function in the package is evaluated as ``Q f(diag(w)) Q.T`` on
top of :func:`decompose`, which runs the cyclic Jacobi kernel selected by
:mod:`qgt._backend`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import config
from ._backend import kernels as _kernels


class ConvergenceError(RuntimeError):
    """The Jacobi iteration hit its sweep cap."""


class DomainError(ValueError):
    """An eigenvalue lies outside the domain of the function being applied."""

    def __init__(self, message, eigenvalue=None, bound=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.bound = bound


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the orthogonal matrix of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        """``basis @ diag(values) @ basis.T``; ``values`` defaults to the eigenvalues."""
        if values is None:
            values = self.eigenvalues
        return _kernels.reconstruct(self.basis, np.asarray(values, dtype=float))


@dataclass(frozen=True)
class ScalarFunction:
    """A real function with its derivative and an open lower domain bound."""

    value: Callable
    derivative: Callable | None = None
    lower: float = -math.inf
    name: str = "f"

    def __call__(self, x):
        return self.value(x)

    def check_domain(self, eigenvalues):
        lo = float(np.min(eigenvalues))
        if not lo > self.lower:
            raise DomainError(
                f"{self.name}: eigenvalue {lo!r} is outside the domain (> {self.lower!r})",
                eigenvalue=lo,
                bound=self.lower,
            )


class SymmetricMatrix:
    """Immutable dense real symmetric matrix.

    The input is symmetrized as ``(M + M.T) / 2``, which leaves an already
    symmetric array bit-identical. The spectral decomposition is computed on
    first use and cached.
    """

    __slots__ = ("array", "_decomposition")

    def __init__(self, entries, decomposition: SpectralDecomposition | None = None):
        a = np.array(entries, dtype=np.float64)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self.array = a
        self._decomposition = decomposition

    @property
    def dim(self) -> int:
        return self.array.shape[0]

    @property
    def decomposition(self) -> SpectralDecomposition:
        if self._decomposition is None:
            self._decomposition = _jacobi(self.array)
        return self._decomposition

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.array
        return self.array.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class PositiveDefiniteMatrix(SymmetricMatrix):
    """Symmetric matrix whose smallest eigenvalue is strictly positive."""

    __slots__ = ()

    def __init__(self, entries, decomposition: SpectralDecomposition | None = None):
        super().__init__(entries, decomposition)
        floor = float(self.decomposition.eigenvalues[0])
        if not floor > 0.0:
            raise DomainError(
                f"matrix is not positive definite: smallest eigenvalue {floor!r}",
                eigenvalue=floor,
                bound=0.0,
            )

    @property
    def spectrum_floor(self) -> float:
        return float(self.decomposition.eigenvalues[0])


@dataclass(frozen=True)
class RandomEnsembleSpec:
    dim: int
    eigenvalue_range: tuple[float, float]
    seed: int

    def __post_init__(self):
        lo, hi = self.eigenvalue_range
        if not 1 <= self.dim <= config.MAX_DIM:
            raise ValueError(f"dim must be in [1, {config.MAX_DIM}], got {self.dim}")
        if not 0.0 < lo <= hi:
            raise ValueError(f"need 0 < lambda_min <= lambda_max, got {self.eigenvalue_range}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def as_array(m) -> np.ndarray:
    if isinstance(m, SymmetricMatrix):
        return m.array
    return np.asarray(m, dtype=np.float64)


def as_symmetric(m) -> SymmetricMatrix:
    return m if isinstance(m, SymmetricMatrix) else SymmetricMatrix(m)


def as_positive_definite(m) -> PositiveDefiniteMatrix:
    if isinstance(m, PositiveDefiniteMatrix):
        return m
    if isinstance(m, SymmetricMatrix):
        return PositiveDefiniteMatrix(m.array, m._decomposition)
    return PositiveDefiniteMatrix(m)


def _jacobi(a: np.ndarray) -> SpectralDecomposition:
    w, v, sweeps = _kernels.jacobi_eigh(a, config.JACOBI_REL_TOL, config.JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {config.JACOBI_MAX_SWEEPS} sweeps"
        )
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def decompose(m) -> SpectralDecomposition:
    """Eigen-decomposition of a symmetric matrix (ascending eigenvalues).

    Raises :class:`ConvergenceError` if the sweep cap is reached.
    """
    return as_symmetric(m).decomposition


def apply_function(m, f, lower: float | None = None) -> SymmetricMatrix:
    """Apply the scalar function ``f`` to ``m`` through its eigenvalues.

    Parameters
    ----------
    m : SymmetricMatrix or array_like
    f : ScalarFunction or callable
        Vectorized over numpy arrays.
    lower : float, optional
        Open lower bound of the domain of ``f``; overrides ``f.lower``.

    Returns
    -------
    SymmetricMatrix
        Carries its decomposition (same basis, transformed eigenvalues).
    """
    dec = decompose(m)
    w = dec.eigenvalues
    if lower is None and isinstance(f, ScalarFunction):
        f.check_domain(w)
    elif lower is not None and not float(w[0]) > lower:
        raise DomainError(
            f"eigenvalue {float(w[0])!r} is outside the domain (> {lower!r})",
            eigenvalue=float(w[0]),
            bound=lower,
        )
    fw = np.asarray(f(w), dtype=np.float64)
    out = _kernels.reconstruct(dec.basis, fw)
    order = np.argsort(fw, kind="stable")
    fw_sorted = fw[order]
    basis = np.ascontiguousarray(dec.basis[:, order])
    fw_sorted.setflags(write=False)
    basis.setflags(write=False)
    return SymmetricMatrix(out, SpectralDecomposition(fw_sorted, basis))


def trace(m) -> float:
    return float(np.trace(as_array(m)))


def trace_product(a, b) -> float:
    """``Tr(a @ b)`` without forming the product."""
    return float(np.sum(as_array(a) * as_array(b).T))


def max_abs(m) -> float:
    return float(np.max(np.abs(as_array(m))))


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Orthogonal factor of a standard-normal matrix, signs fixed so diag(R) > 0."""
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs


def log_uniform(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    if lo == hi:
        return np.full(size, float(lo))
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def random_pd_array(rng: np.random.Generator, dim: int, eigenvalue_range) -> np.ndarray:
    """Draw ``Q diag(w) Q.T`` with ``w`` log-uniform in ``eigenvalue_range``.

    Draw order (fixed for reproducibility): the ``dim x dim`` Gaussian for Q,
    then the ``dim`` eigenvalues.
    """
    lo, hi = eigenvalue_range
    q = random_orthogonal(rng, dim)
    w = log_uniform(rng, lo, hi, dim)
    return _kernels.reconstruct(q, w)


def random_pd(spec: RandomEnsembleSpec) -> PositiveDefiniteMatrix:
    """Seeded random positive definite matrix; bit-reproducible for a fixed spec."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return PositiveDefiniteMatrix(random_pd_array(rng, spec.dim, spec.eigenvalue_range))


def random_symmetric_array(rng: np.random.Generator, dim: int, low=-2.0, high=2.0) -> np.ndarray:
    """Symmetric matrix with upper-triangle entries uniform in ``[low, high]``."""
    u = rng.uniform(low, high, (dim, dim))
    upper = np.triu(u)
    return upper + np.triu(u, 1).T
