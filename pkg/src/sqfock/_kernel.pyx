# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gaussian Fock-projection kernel.

Same contract and node placement as ``_kernel_py``: for each element k,

    I_k = int phi_n(x) exp(-alpha_k x^2 / 2 - beta_k x + gamma_k) dx

on Gauss-Hermite nodes shifted and scaled so the real Gaussian part of the
integrand matches the rule's weight.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport M_PI, pow, sqrt, exp, cos, sin

cnp.import_array()


cdef int _accumulate(int n_max, bint keep_all, double complex alpha,
                     double complex beta, double complex gamma,
                     const double[::1] y, const double[::1] w,
                     const double[::1] rcoef, const double[::1] lcoef,
                     double[::1] acc_r, double[::1] acc_i,
                     double complex[:, ::1] out, Py_ssize_t k) except -1:
    cdef double spread = 1.0 + alpha.real
    if spread <= 0.0:
        raise ValueError("integrand is not normalizable (Re alpha <= -1)")
    cdef double center = -beta.real / spread
    cdef double scale = sqrt(2.0 / spread)
    cdef double pref = scale * exp(0.5 * beta.real * beta.real / spread + gamma.real)
    cdef double h0 = pow(M_PI, -0.25)
    cdef Py_ssize_t i, j, m = y.shape[0]
    cdef double x, phase, wr, wi, h, hp, hn
    cdef int top = n_max if keep_all else 0
    for j in range(top + 1):
        acc_r[j] = 0.0
        acc_i[j] = 0.0
    for i in range(m):
        x = center + scale * y[i]
        phase = -0.5 * alpha.imag * x * x - beta.imag * x + gamma.imag
        wr = w[i] * cos(phase)
        wi = w[i] * sin(phase)
        hp = 0.0
        h = h0
        if keep_all:
            acc_r[0] += wr * h
            acc_i[0] += wi * h
            for j in range(n_max):
                hn = rcoef[j] * x * h - lcoef[j] * hp
                hp = h
                h = hn
                acc_r[j + 1] += wr * h
                acc_i[j + 1] += wi * h
        else:
            for j in range(n_max):
                hn = rcoef[j] * x * h - lcoef[j] * hp
                hp = h
                h = hn
            acc_r[0] += wr * h
            acc_i[0] += wi * h
    for j in range(top + 1):
        out[j, k].real = pref * acc_r[j]
        out[j, k].imag = pref * acc_i[j]
    return 0


def _coefficients(int n_max):
    k = np.arange(max(n_max, 1), dtype=float)
    return np.ascontiguousarray(np.sqrt(2.0 / (k + 1))), np.ascontiguousarray(np.sqrt(k / (k + 1)))


def _run(int n_max, bint keep_all, alpha, beta, gamma, y, w):
    cdef const double complex[::1] a = np.ascontiguousarray(alpha, dtype=complex)
    cdef const double complex[::1] b = np.ascontiguousarray(beta, dtype=complex)
    cdef const double complex[::1] g = np.ascontiguousarray(gamma, dtype=complex)
    cdef const double[::1] yy = np.ascontiguousarray(y, dtype=float)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=float)
    rc, lc = _coefficients(n_max)
    cdef const double[::1] rcoef = rc
    cdef const double[::1] lcoef = lc
    cdef Py_ssize_t k, size = b.shape[0]
    result = np.empty((n_max + 1 if keep_all else 1, size), dtype=complex)
    cdef double complex[:, ::1] out = result
    cdef double[::1] acc_r = np.empty(n_max + 1)
    cdef double[::1] acc_i = np.empty(n_max + 1)
    for k in range(size):
        _accumulate(n_max, keep_all, a[k], b[k], g[k], yy, ww, rcoef, lcoef,
                    acc_r, acc_i, out, k)
    return result


def project_one(int n, alpha, beta, gamma, y, w):
    return _run(n, False, alpha, beta, gamma, y, w)[0]


def project_all(int n_max, alpha, beta, gamma, y, w):
    return _run(n_max, True, alpha, beta, gamma, y, w)
