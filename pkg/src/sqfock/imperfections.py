"""Uniform input loss and imperfect photon-number-resolving detectors.

Loss is modeled as a spread of the input squeezing around its optimal value:
each ``r_i`` follows a Gaussian of width ``mu |r_opt,i|`` truncated to the
interval between 0 and ``r_opt,i``. Detector inefficiency is a beam splitter
that passes a fraction ``eta`` of the measured mode, computed two ways: by
nested quadrature over the three-mode wavefunction and by binomial thinning
of the two-mode Fock expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidParametersError
from .numerics import (DEFAULT_QUAD, N_CAP, erf_eval, gauss_hermite_rule,
                       gauss_legendre_rule, gaussian_scales,
                       hermite_function_table)
from .protocol import entangler_to_tmeg, optimal_entangler, solve_inputs
from .states import fock_expand, herald_batch, heralded_fidelity, sf_wavefunction

PLATEAU_LEVEL = 0.99
_SUPPORT_SIGMAS = 12.0


@dataclass(frozen=True)
class LossModel:
    """Relative spread ``mu`` of the input squeezing; ``mu = 0`` is lossless."""

    mu: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        if not (self.mu >= 0.0 and math.isfinite(self.mu)):
            raise InvalidParametersError(f"mu must be finite and non-negative, got {self.mu}")

    @staticmethod
    def interval(r_opt):
        return min(0.0, r_opt), max(0.0, r_opt)

    def support(self, r_opt):
        """Integration interval: the truncation interval cut to ``r_opt -+ 12 sigma``."""
        lo, hi = self.interval(r_opt)
        reach = _SUPPORT_SIGMAS * self.mu * abs(r_opt)
        return max(lo, r_opt - reach), min(hi, r_opt + reach)


@dataclass(frozen=True)
class DetectorModel:
    """Detector that registers each photon with probability ``eta_eff``."""

    eta_eff: float

    def __post_init__(self):
        object.__setattr__(self, "eta_eff", float(self.eta_eff))
        if not 0.0 < self.eta_eff <= 1.0:
            raise InvalidParametersError(f"efficiency must lie in (0, 1], got {self.eta_eff}")


def loss_pdf(r, r_opt, mu):
    """Truncated Gaussian density of one input squeezing parameter.

    ``sqrt(2) / (sqrt(pi) sigma erf(1/(sqrt(2) mu))) exp(-(r - r_opt)^2 / (2 sigma^2))``
    with ``sigma = mu |r_opt|`` on the interval between 0 and ``r_opt``, and
    zero outside it. The prefactor makes the density integrate to one.
    """
    if not mu > 0:
        raise InvalidParametersError("loss_pdf needs mu > 0; mu = 0 is the exact protocol")
    if r_opt == 0:
        raise InvalidParametersError("loss_pdf needs r_opt != 0")
    r = np.asarray(r, dtype=float)
    sigma = mu * abs(r_opt)
    lo, hi = LossModel.interval(r_opt)
    norm = math.sqrt(2.0) / (math.sqrt(math.pi) * sigma * erf_eval(1.0 / (math.sqrt(2.0) * mu)))
    out = np.where((r >= lo) & (r <= hi), norm * np.exp(-0.5 * ((r - r_opt) / sigma) ** 2), 0.0)
    return out[()] if out.ndim == 0 else out


def _loss_nodes(r_opt, mu, order):
    """Gauss-Legendre nodes and pdf-weighted weights for one axis."""
    if r_opt == 0.0:
        return np.array([0.0]), np.array([1.0])
    lo, hi = LossModel(mu).support(r_opt)
    rule = gauss_legendre_rule(order, lo, hi)
    return rule.nodes, rule.weights * loss_pdf(rule.nodes, r_opt, mu)


@dataclass(frozen=True)
class AveragedMetrics:
    """Loss-averaged probability and fidelity with their deficits."""

    kind: str
    mu: float
    param: float
    r_opt: tuple
    p_opt: float
    p_avg: float
    f_avg: float

    @property
    def p_deficit(self):
        return self.p_opt - self.p_avg

    @property
    def p_deficit_rel(self):
        return self.p_deficit / self.p_opt

    @property
    def f_deficit(self):
        return 1.0 - self.f_avg


def averaged_metrics(kind, target, mu, quad=DEFAULT_QUAD, entangler=None):
    """Average ``P_n`` and ``F_n`` over the loss distribution of both inputs.

    The entangler is fixed at its lossless optimum (or ``entangler`` when
    given). The double integral uses a tensor Gauss-Legendre rule of
    ``quad.order_loss`` points per axis.
    """
    loss = LossModel(mu)
    if entangler is None:
        entangler, _ = optimal_entangler(target, kind, quad)
    sol = solve_inputs(entangler, target)
    p_opt, f_opt = heralded_fidelity(entangler_to_tmeg(entangler, sol.r1, sol.r2), target, quad)
    if loss.mu == 0.0:
        return AveragedMetrics(kind, 0.0, entangler.param, (sol.r1, sol.r2), p_opt, p_opt, f_opt)
    x1, w1 = _loss_nodes(sol.r1, loss.mu, quad.order_loss)
    x2, w2 = _loss_nodes(sol.r2, loss.mu, quad.order_loss)
    r1, r2 = np.meshgrid(x1, x2, indexing="ij")
    a, b, d = _tmeg_arrays(entangler, r1, r2)
    P, F = herald_batch(a, b, d, target, quad)
    weight = np.outer(w1, w2).ravel()
    p_avg = float(np.sum(weight * P))
    f_avg = float(np.sum(weight * F))
    return AveragedMetrics(kind, loss.mu, entangler.param, (sol.r1, sol.r2), p_opt, p_avg, f_avg)


def _tmeg_arrays(e, r1, r2):
    u, v = np.exp(2.0 * np.asarray(r1, float)), np.exp(2.0 * np.asarray(r2, float))
    if e.kind == "bs":
        t = e.t
        return (u * (1 - t) + v * t, math.sqrt(t * (1 - t)) * (u - v) + 0j, u * t + v * (1 - t))
    return u + 0j, np.full(u.shape, 1j * e.g), v + 0j


@dataclass(frozen=True)
class FidelitySurface:
    """``F_n`` (and ``P_n``) on an ``r1 x r2`` grid; NaN marks invalid points."""

    kind: str
    param: float
    r1: np.ndarray = field(repr=False)
    r2: np.ndarray = field(repr=False)
    fidelity: np.ndarray = field(repr=False)
    probability: np.ndarray = field(repr=False)

    @property
    def plateau_fraction(self):
        """Share of all grid points with ``F >= 0.99``; invalid points count as outside."""
        with np.errstate(invalid="ignore"):
            return float(np.mean(self.fidelity >= PLATEAU_LEVEL))


def fidelity_surface(kind, target, r1_grid, r2_grid, quad=DEFAULT_QUAD, entangler=None):
    """Fidelity over input squeezing with the entangler held at its optimum."""
    if entangler is None:
        entangler, _ = optimal_entangler(target, kind, quad)
    r1_grid = np.asarray(r1_grid, float)
    r2_grid = np.asarray(r2_grid, float)
    r1, r2 = np.meshgrid(r1_grid, r2_grid, indexing="ij")
    a, b, d = _tmeg_arrays(entangler, r1, r2)
    P, F = herald_batch(a, b, d, target, quad)
    shape = r1.shape
    return FidelitySurface(kind, entangler.param, r1_grid, r2_grid, F.reshape(shape), P.reshape(shape))


def thinning_amplitude(m, M, eta):
    """Amplitude for ``m`` photons to leave ``M`` at a detector of efficiency ``eta``.

    ``(-1)^{m-M} sqrt(C(m, M)) eta^{M/2} (1 - eta)^{(m-M)/2}``; its square is
    the binomial thinning weight.
    """
    if not 0 <= M <= m:
        raise ValueError(f"need 0 <= M <= m, got m={m}, M={M}")
    return ((-1) ** (m - M) * math.sqrt(math.comb(m, M))
            * eta ** (0.5 * M) * (1.0 - eta) ** (0.5 * (m - M)))


def _check_eta(eta):
    return DetectorModel(eta).eta_eff


def detector_fidelity_quadrature(p, target, eta, quad=DEFAULT_QUAD):
    """Fidelity of the state heralded by an inefficient detector, by quadrature.

    Mode 1 is mixed with vacuum mode 3 on a beam splitter that transmits a
    fraction ``eta`` to the detector:
    ``Psi_out(x2, x3) = int Psi(sqrt(eta) x1 + sqrt(1-eta) x3, x2)
    psi_vac(sqrt(1-eta) x1 - sqrt(eta) x3) phi_n(x1) dx1``. The fidelity is
    ``int dx3 |int dx2 Psi_out Psi_SF|^2`` over the norm of ``Psi_out``.
    """
    eta = _check_eta(eta)
    rho = 1.0 - eta
    a, b, d = p.a, p.b, p.d
    se, sr = math.sqrt(eta), math.sqrt(rho)
    # Gaussian exponent -v^T Q v / 2 of Psi_out in (x2, x3) after eliminating x1
    m11 = a * eta + rho + 1.0
    m1 = np.array([se * b, se * sr * (a - 1.0)])
    q = np.array([[d, b * sr], [b * sr, a * rho + eta]]) - np.outer(m1, m1) / m11
    s2, s3 = gaussian_scales(q.real)
    s2 = max(s2, math.exp(-target.R))
    x2, w2 = gauss_hermite_rule(quad.order_nd).scaled(s2)
    x3, w3 = gauss_hermite_rule(quad.order_nd).scaled(s3)
    X2, X3 = np.meshgrid(x2, x3, indexing="ij")
    alpha = a * eta + rho
    beta = se * b * X2 + se * sr * (a - 1.0) * X3
    gamma = (-0.5 * (d * X2**2 + 2.0 * b * sr * X2 * X3 + (a * rho + eta) * X3**2)
             + p.log_norm - 0.25 * math.log(math.pi))
    psi = kernels.project_one(target.n, alpha, beta, gamma, gauss_hermite_rule(quad.order_nd))
    norm = float(np.sum(np.abs(psi) ** 2 * np.outer(w2, w3)))
    overlap = (w2 * sf_wavefunction(target, x2)) @ psi
    return float(np.sum(w3 * np.abs(overlap) ** 2)) / norm


def sf_fock_coefficients(target, n_max, quad=DEFAULT_QUAD):
    """``<k|Psi_SF>`` for ``k = 0..n_max`` by quadrature."""
    E = math.exp(2.0 * target.R)
    rule = gauss_hermite_rule(max(quad.order_1d, 2 * n_max + 40))
    x, w = rule.scaled(math.sqrt(2.0 / (1.0 + E)))
    return hermite_function_table(n_max, x) @ (w * sf_wavefunction(target, x))


def detector_fidelity_fock(p, target, eta, n_max=N_CAP, quad=DEFAULT_QUAD,
                           threshold=1e-6, cap=None, expansion=None):
    """Fidelity of the detector-heralded state from binomial thinning.

    Detecting ``M = target.n`` leaves mode 2 in
    ``rho ~ sum_m |A_mM|^2 |Psi_m><Psi_m|`` with ``|Psi_m> = sum_k C_mk |k>``.
    ``expansion`` may pass a precomputed :class:`FockExpansion`.
    """
    eta = _check_eta(eta)
    cap = max(N_CAP, n_max) if cap is None else cap
    fe = expansion or fock_expand(p, n_max, quad, threshold, cap)
    n_max = fe.n_max
    s = sf_fock_coefficients(target, n_max, quad)
    M = target.n
    weights = np.array([thinning_amplitude(m, M, eta) ** 2 for m in range(M, n_max + 1)])
    rows = fe.coeffs[M:]
    overlaps = np.abs(rows @ np.conj(s)) ** 2
    norms = np.sum(np.abs(rows) ** 2, axis=1)
    return float(np.sum(weights * overlaps) / np.sum(weights * norms))
