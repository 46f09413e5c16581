# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi eigensolver and spectral reconstruction.

Mirrors :mod:`qgt._pykernels` operation for operation; the two are
interchangeable behind :mod:`qgt._backend`.
"""
import numpy as np

from libc.math cimport sqrt, fabs


cdef void _rotate(double[:, ::1] a, double[:, ::1] v, Py_ssize_t n,
                  Py_ssize_t p, Py_ssize_t q) noexcept nogil:
    cdef double apq = a[p, q]
    cdef double theta, t, c, s, x, y
    cdef Py_ssize_t k
    if apq == 0.0:
        return
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if fabs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / sqrt(t * t + 1.0)
    s = t * c
    for k in range(n):
        x = a[k, p]
        y = a[k, q]
        a[k, p] = c * x - s * y
        a[k, q] = s * x + c * y
    for k in range(n):
        x = a[p, k]
        y = a[q, k]
        a[p, k] = c * x - s * y
        a[q, k] = s * x + c * y
    a[p, q] = 0.0
    a[q, p] = 0.0
    for k in range(n):
        x = v[k, p]
        y = v[k, q]
        v[k, p] = c * x - s * y
        v[k, q] = s * x + c * y


cdef int _jacobi(double[:, ::1] a, double[:, ::1] v, double rel_tol,
                 int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double fro = 0.0, off
    cdef int sweep
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = sqrt(fro)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if sqrt(off) <= rel_tol * fro:
            return sweep
        if sweep == max_sweeps:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                _rotate(a, v, n, i, j)
    return -1


def jacobi_eigh(m, double rel_tol, int max_sweeps):
    """Return ``(eigenvalues, basis, sweeps)``; ``sweeps == -1`` on non-convergence.

    Eigenvalues come back ascending with the basis columns permuted to match.
    """
    cdef double[:, ::1] a = np.array(m, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = v_arr
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(a, v, rel_tol, max_sweeps)
    w = np.asarray(a).diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v_arr[:, order]), sweeps


def reconstruct(basis, values):
    """Symmetric ``basis @ diag(values) @ basis.T``, computed on one triangle."""
    cdef const double[:, ::1] q = np.ascontiguousarray(basis, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = q.shape[0]
    out_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    with nogil:
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for k in range(n):
                    acc += q[i, k] * d[k] * q[j, k]
                out[i, j] = acc
                out[j, i] = acc
    return out_arr
