"""Pure numpy implementation of the Gaussian Fock-projection kernel.

Computes, for every element ``k`` of the flat input arrays,

    I_k = int phi_n(x) exp(-alpha_k x^2 / 2 - beta_k x + gamma_k) dx

Nodes are placed at ``x = c + s y`` with ``c = -Re(beta) / A``,
``s = sqrt(2 / A)`` and ``A = 1 + Re(alpha)``, which turns the real Gaussian
part of the integrand into exactly ``exp(-y^2)`` times a constant. What the
rule still has to integrate is the Hermite polynomial times the phase
``exp(-i Im(alpha) x^2 / 2 - i Im(beta) x)``. Every summand is bounded by the
envelope, so accuracy is limited by resolving that phase, never by
cancellation; strongly oscillating integrands need more nodes.
"""

import math

import numpy as np

_PI_M_QUARTER = math.pi ** -0.25
_CHUNK_ELEMENTS = 1 << 18


def _prepare(alpha, beta, gamma, y, w):
    spread = 1.0 + alpha.real
    if np.any(spread <= 0.0):
        raise ValueError("integrand is not normalizable (Re alpha <= -1)")
    center = -beta.real / spread
    scale = np.sqrt(2.0 / spread)
    x = center[:, None] + scale[:, None] * y[None, :]
    phase = (-0.5 * alpha.imag[:, None] * x**2 - beta.imag[:, None] * x
             + gamma.imag[:, None])
    pref = scale * np.exp(0.5 * beta.real**2 / spread + gamma.real)
    return x, w * np.exp(1j * phase), pref


def _chunks(size, width):
    step = max(1, _CHUNK_ELEMENTS // max(width, 1))
    for start in range(0, size, step):
        yield slice(start, min(size, start + step))


def project_one(n, alpha, beta, gamma, y, w):
    size = beta.shape[0]
    out = np.empty(size, dtype=complex)
    for sl in _chunks(size, y.shape[0]):
        x, wo, pref = _prepare(alpha[sl], beta[sl], gamma[sl], y, w)
        h_prev = np.zeros_like(x)
        h = np.full_like(x, _PI_M_QUARTER)
        for k in range(n):
            h_prev, h = h, (math.sqrt(2.0 / (k + 1)) * x * h
                            - math.sqrt(k / (k + 1)) * h_prev)
        out[sl] = pref * (h * wo).sum(axis=1)
    return out


def project_all(n_max, alpha, beta, gamma, y, w):
    size = beta.shape[0]
    out = np.empty((n_max + 1, size), dtype=complex)
    for sl in _chunks(size, y.shape[0]):
        x, wo, pref = _prepare(alpha[sl], beta[sl], gamma[sl], y, w)
        h_prev = np.zeros_like(x)
        h = np.full_like(x, _PI_M_QUARTER)
        out[0, sl] = pref * (h * wo).sum(axis=1)
        for k in range(n_max):
            h_prev, h = h, (math.sqrt(2.0 / (k + 1)) * x * h
                            - math.sqrt(k / (k + 1)) * h_prev)
            out[k + 1, sl] = pref * (h * wo).sum(axis=1)
    return out
