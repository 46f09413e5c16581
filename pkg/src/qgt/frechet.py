"""Fréchet derivatives of spectral matrix functions (Daleckii-Krein formula).

For ``A = Q diag(w) Q.T`` the derivative of ``f`` at ``A`` in direction ``B`` is
``Q (T * (Q.T B Q)) Q.T`` with ``T[i, j] = f[w_i, w_j]`` the first divided
differences of ``f`` on the spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .spectral import ScalarFunction, SymmetricMatrix, apply_function, as_array, decompose


@dataclass(frozen=True)
class DividedDifferenceTable:
    eigenvalues: np.ndarray
    table: np.ndarray


def divided_differences(eigenvalues, f: ScalarFunction) -> DividedDifferenceTable:
    """First divided differences of ``f`` on ``eigenvalues``.

    Pairs closer than ``DEGENERACY_REL * max(1, |a|, |b|)`` use ``f'`` at their
    midpoint; the diagonal is ``f'(w_i)``.
    """
    if f.derivative is None:
        raise ValueError(f"{f.name} has no derivative")
    w = np.asarray(eigenvalues, dtype=np.float64)
    fw = np.asarray(f(w), dtype=np.float64)
    diff = w[:, None] - w[None, :]
    scale = np.maximum(1.0, np.maximum(np.abs(w)[:, None], np.abs(w)[None, :]))
    close = np.abs(diff) <= config.DEGENERACY_REL * scale
    safe = np.where(close, 1.0, diff)
    quotient = (fw[:, None] - fw[None, :]) / safe
    mid = 0.5 * (w[:, None] + w[None, :])
    table = np.where(close, np.asarray(f.derivative(mid), dtype=np.float64), quotient)
    np.fill_diagonal(table, np.asarray(f.derivative(w), dtype=np.float64))
    return DividedDifferenceTable(w, table)


def frechet(a, f: ScalarFunction, b) -> SymmetricMatrix:
    """Directional derivative ``d f(A) B`` of the matrix function ``f``."""
    dec = decompose(a)
    f.check_domain(dec.eigenvalues)
    bm = as_array(b)
    if bm.shape != dec.basis.shape:
        raise ValueError(f"direction shape {bm.shape} does not match {dec.basis.shape}")
    q = dec.basis
    rotated = q.T @ bm @ q
    table = divided_differences(dec.eigenvalues, f).table
    return SymmetricMatrix(q @ (table * rotated) @ q.T)


def trace_derivative_identity_check(a, f: ScalarFunction, b) -> float:
    """``|Tr d f(A) B - Tr f'(A) B|``; zero up to rounding for differentiable ``f``."""
    lhs = float(np.trace(frechet(a, f, b).array))
    deriv = apply_function(a, ScalarFunction(f.derivative, None, f.lower, f"{f.name}'"))
    rhs = float(np.sum(deriv.array * as_array(b).T))
    return abs(lhs - rhs)


def central_difference(func, a, b, h: float = config.FD_STEP) -> np.ndarray:
    """``(func(A + hB) - func(A - hB)) / 2h`` for a matrix-valued ``func``."""
    am = as_array(a)
    bm = as_array(b)
    plus = as_array(func(am + h * bm))
    minus = as_array(func(am - h * bm))
    return (plus - minus) / (2.0 * h)
