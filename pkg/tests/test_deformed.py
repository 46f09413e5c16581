import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgt.deformed import (
    DensityMatrix,
    check_q,
    matrix_q_exp,
    matrix_q_log,
    q_exp,
    q_exp_derivative,
    q_log,
    q_log_derivative,
    random_density_array,
    tsallis_entropy,
    tsallis_entropy_trace_form,
    von_neumann_entropy,
)
from qgt.spectral import DomainError, decompose

from conftest import random_pd

Q_VALUES = (1.0, 1.0 + 1e-9, 1.5, 2.0, 2.5, 3.0)


@pytest.mark.parametrize("q", [1.0, 1.2, 2.0, 3.0])
def test_q_log_of_one(q):
    assert q_log(1.0, q) == 0.0


def test_q_log_examples():
    assert q_log(3.0, 2.0) == pytest.approx(2.0, rel=1e-15)
    assert q_log(2.0, 3.0) == pytest.approx(1.5, rel=1e-15)


def test_q_exp_examples():
    for q in (1.0, 1.5, 2.0, 3.0):
        assert q_exp(0.0, q) == 1.0
    assert q_exp(1.0, 1.5) == pytest.approx(2.25, rel=1e-15)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("x", [0.1, 1.0, 7.0])
def test_inverse_examples(q, x):
    assert q_exp(q_log(x, q), q) == pytest.approx(x, rel=1e-12)


def test_q_range_enforced():
    for bad in (0.5, 3.0001, -1.0):
        with pytest.raises(ValueError):
            check_q(bad)


def test_domain_errors():
    with pytest.raises(DomainError):
        q_log(0.0, 1.5)
    with pytest.raises(DomainError) as exc:
        q_exp(-2.0, 1.5)  # bound -1/(q-1) = -2
    assert exc.value.bound == -2.0


@settings(max_examples=300, deadline=None)
@given(st.floats(-3.0, 3.0), st.sampled_from(Q_VALUES))
def test_inverse_pair_property(log10x, q):
    x = 10.0 ** log10x
    assert q_exp(q_log(x, q), q) == pytest.approx(x, rel=1e-12)
    y = q_log(x, q)
    assert q_log(q_exp(y, q), q) == pytest.approx(y, rel=1e-12, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.49, 50.0), st.floats(1e-6, 1.0), st.sampled_from(Q_VALUES))
def test_q_exp_strictly_increasing(x, dx, q):
    assert q_exp(x + dx, q) > q_exp(x, q)


def test_continuity_at_one_linear_order():
    xs = np.linspace(0.1, 10.0, 50)
    deltas = np.array([1e-4, 1e-6, 1e-8])
    errs = np.array([np.max(np.abs(q_log(xs, 1.0 + d) - np.log(xs))) for d in deltas])
    constants = errs / deltas
    slope = np.polyfit(np.log(deltas), np.log(errs), 1)[0]
    assert abs(slope - 1.0) < 0.05
    assert constants.max() / constants.min() < 1.1


@pytest.mark.parametrize("q", [1.0, 1.3, 1.5, 2.0, 2.5, 3.0])
def test_derivatives_vs_finite_differences(q):
    h = 1e-5
    for x in (0.2, 0.7, 1.0, 2.5, 9.0):
        fd = (q_log(x + h, q) - q_log(x - h, q)) / (2 * h)
        assert q_log_derivative(x, q) == pytest.approx(fd, rel=1e-6)
        fd = (q_exp(x + h, q) - q_exp(x - h, q)) / (2 * h)
        assert q_exp_derivative(x, q) == pytest.approx(fd, rel=1e-6)


def test_derivative_examples():
    for q in (1.0, 1.7, 3.0):
        assert q_log_derivative(1.0, q) == 1.0
        assert q_exp_derivative(0.0, q) == 1.0
    h = 1e-5
    fd = (q_exp(1 + h, 1.5) - q_exp(1 - h, 1.5)) / (2 * h)
    assert fd == pytest.approx(1.5, rel=1e-9)
    assert q_exp_derivative(1.0, 1.5) == pytest.approx(1.5, rel=1e-15)


def test_matrix_q_log_examples():
    for q in (1.0, 2.0, 2.7):
        assert np.max(np.abs(matrix_q_log(np.eye(3), q).array)) == 0.0
    assert np.allclose(matrix_q_log(np.diag([3.0, 1.0]), 2.0).array, np.diag([2.0, 0.0]),
                       atol=1e-15)


def test_matrix_round_trip(rng):
    a = random_pd(rng, 4)
    back = matrix_q_exp(matrix_q_log(a, 1.7), 1.7).array
    assert np.max(np.abs(back - a)) <= 1e-9


def test_matrix_q_exp_examples():
    for q in (1.0, 2.0, 3.0):
        assert np.allclose(matrix_q_exp(np.zeros((3, 3)), q).array, np.eye(3), atol=1e-15)
    assert np.allclose(matrix_q_exp(np.diag([1.0, 0.0]), 2.0).array, np.diag([2.0, 1.0]),
                       atol=1e-15)
    x = np.array([[0.5, 0.2], [0.2, 0.3]])
    w = np.linalg.eigvalsh(matrix_q_exp(x, 2.5).array)
    assert w == pytest.approx([q_exp(v, 2.5) for v in np.linalg.eigvalsh(x)], rel=1e-13)


def test_matrix_q_exp_domain_message():
    with pytest.raises(DomainError) as exc:
        matrix_q_exp(np.diag([-1.0, 0.0]), 3.0)
    assert exc.value.eigenvalue == -1.0
    assert exc.value.bound == -0.5


def test_diagonal_matrices_act_entrywise():
    d = np.array([0.3, 1.0, 4.0, 11.0])
    for q in (1.0, 1.4, 2.0, 2.9):
        assert np.array_equal(np.diag(matrix_q_log(np.diag(d), q).array), q_log(d, q))
        x = q_log(d, q)
        assert np.array_equal(np.diag(matrix_q_exp(np.diag(x), q).array), q_exp(x, q))


def test_density_matrix_requires_unit_trace():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]))
    DensityMatrix(np.diag([0.25, 0.75]))


def test_pure_state_entropy_near_zero():
    floor = 1e-12
    rho = DensityMatrix.from_spectrum([1.0 - 3 * floor, floor, floor, floor])
    for q in (1.0, 1.5, 2.0, 3.0):
        assert 0.0 <= tsallis_entropy(rho, q) <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 7])
def test_maximally_mixed_q2(d):
    rho = DensityMatrix(np.eye(d) / d)
    assert tsallis_entropy(rho, 2.0) == pytest.approx(1 - 1 / d, abs=1e-12)


def test_limit_q_to_one(rng):
    rho = random_density_array(rng, 3)
    assert tsallis_entropy(rho, 1.0001) == pytest.approx(von_neumann_entropy(rho), abs=1e-3)
    assert tsallis_entropy(rho, 1.0) == von_neumann_entropy(rho)


@pytest.mark.parametrize("q", [1.0, 1.0001, 1.5, 2.0, 2.5, 3.0])
def test_entropy_forms_agree(q):
    rng = np.random.Generator(np.random.PCG64(int(q * 1e4)))
    for i in range(200):
        rho = random_density_array(rng, 1 + i % 8)
        closed = tsallis_entropy(rho, q)
        assert closed >= 0.0
        assert abs(closed - tsallis_entropy_trace_form(rho, q)) <= 1e-10


def test_von_neumann_matches_independent_eigensolver(rng):
    rho = random_density_array(rng, 5)
    w = np.linalg.eigvalsh(rho)
    assert von_neumann_entropy(rho) == pytest.approx(-np.sum(w * np.log(w)), rel=1e-12)
    assert decompose(rho).eigenvalues.sum() == pytest.approx(1.0, abs=1e-14)
