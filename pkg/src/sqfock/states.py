"""Two-mode Gaussian inputs, squeezed Fock targets and heralded outputs.

Wavefunctions are exchanged as tabulations on Gauss-Hermite grids whose
nodes are stretched to the widest Gaussian envelope involved; every
downstream quantity (probabilities, overlaps, Fock coefficients) is an
integral over such a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (InvalidParametersError, NormalizationError,
                     SingularConfigurationError, TruncationError,
                     UnheraldableOutcomeError)
from .numerics import (DEFAULT_QUAD, N_CAP, check_cap, fock_mode_function,
                       gauss_hermite_rule, hermite_eval, hermite_function_table,
                       log_factorial)

HERALD_FLOOR = 1e-14
"""Heralding probabilities below this are treated as impossible outcomes."""


@dataclass(frozen=True)
class TmegParams:
    """Quadratic-form coefficients of a non-displaced two-mode Gaussian.

    The wavefunction is
    ``Psi(x1, x2) = N exp(-(a x1^2 + 2 b x1 x2 + d x2^2) / 2)`` with
    ``N = (Re a Re d - (Re b)^2)^(1/4) / sqrt(pi)``.
    """

    a: complex
    b: complex
    d: complex

    def __post_init__(self):
        for name in ("a", "b", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if not self.is_valid(self.a, self.b, self.d):
            raise InvalidParametersError(
                f"not normalizable: a={self.a}, b={self.b}, d={self.d} "
                "(need Re a > 0, Re d > 0, Re a Re d > (Re b)^2)")

    @staticmethod
    def is_valid(a, b, d):
        a, b, d = complex(a), complex(b), complex(d)
        return (a.real > 0 and d.real > 0
                and a.real * d.real - b.real**2 > 0
                and all(math.isfinite(v) for v in (a.real, a.imag, b.real, b.imag, d.real, d.imag)))

    @property
    def log_norm(self):
        det = self.a.real * self.d.real - self.b.real**2
        return 0.25 * math.log(det) - 0.5 * math.log(math.pi)

    @property
    def kappa(self):
        """Exponent ``d - b^2/(a+1)`` of every heralded output amplitude."""
        return self.d - self.b**2 / (self.a + 1.0)


@dataclass(frozen=True)
class SFTarget:
    """Squeezed Fock state with photon number ``n`` and squeezing ``R``."""

    n: int
    R: float
    cap: int = field(default=N_CAP, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "R", float(self.R))
        check_cap(self.n, self.cap)
        if not math.isfinite(self.R):
            raise InvalidParametersError("squeezing parameter must be finite")

    @property
    def log_A(self):
        """``log(2^n n! sqrt(pi))``."""
        return self.n * math.log(2.0) + log_factorial(self.n) + 0.5 * math.log(math.pi)


@dataclass(frozen=True)
class Wavefunction:
    """Single-mode wavefunction tabulated on quadrature nodes ``x`` with plain weights."""

    x: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def same_grid(self, other):
        return (self.x.shape == other.x.shape
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.weights, other.weights))

    def inner(self, other):
        """``<self|other>``."""
        if not self.same_grid(other):
            raise ValueError("wavefunctions are tabulated on different grids")
        return complex(np.sum(self.weights * np.conj(self.values) * other.values))

    def norm(self):
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def normalized(self):
        return Wavefunction(self.x, self.weights, self.values / math.sqrt(self.norm()))


def gh_grid(scale, order):
    """Plain-weight Gauss-Hermite grid stretched by ``scale``."""
    return gauss_hermite_rule(order).scaled(scale)


def output_scale(params, R=None):
    """Node scale covering the heralded output envelope (and the target, if given)."""
    k = params.kappa.real
    if k <= 0:
        raise InvalidParametersError("heralded output envelope is not normalizable")
    scale = 1.0 / math.sqrt(k)
    if R is not None:
        scale = max(scale, math.exp(-R))
    return scale


def tmeg_wavefunction(p, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return np.exp(p.log_norm - 0.5 * (p.a * x1**2 + 2.0 * p.b * x1 * x2 + p.d * x2**2))


def sf_wavefunction(t, x):
    """Squeezed Fock wavefunction, ``e^{R/2} phi_n(e^R x)``."""
    x = np.asarray(x, dtype=float)
    return math.exp(0.5 * t.R) * fock_mode_function(t.n, math.exp(t.R) * x, cap=t.cap)


def sf_tabulated(t, x, weights):
    return Wavefunction(np.asarray(x), np.asarray(weights), sf_wavefunction(t, x).astype(complex))


def heralded_amplitude(p, n, x2, order=DEFAULT_QUAD.order_nd):
    """Unnormalized output amplitude ``int phi_n(x1) Psi(x1, x2) dx1``."""
    x2 = np.asarray(x2, dtype=float)
    return kernels.project_one(n, p.a, p.b * x2, p.log_norm - 0.5 * p.d * x2**2,
                               gauss_hermite_rule(order))


@dataclass(frozen=True)
class ProjectionResult:
    """Outcome of measuring ``n`` photons in mode 1 of a two-mode Gaussian."""

    params: TmegParams
    n: int
    probability: float
    amplitude: Wavefunction = field(repr=False)
    inner_order: int = field(default=DEFAULT_QUAD.order_nd, repr=False)

    @property
    def heraldable(self):
        return self.probability >= HERALD_FLOOR

    def _require(self):
        if not self.heraldable:
            raise UnheraldableOutcomeError(
                f"outcome n={self.n} has probability {self.probability:.3g}",
                self.probability)

    @property
    def conditional(self):
        """Normalized conditional state of mode 2, tabulated."""
        self._require()
        a = self.amplitude
        return Wavefunction(a.x, a.weights, a.values / math.sqrt(self.probability))

    def conditional_amplitude(self, x):
        """Normalized conditional state evaluated at arbitrary points."""
        self._require()
        return heralded_amplitude(self.params, self.n, x, self.inner_order) / math.sqrt(self.probability)


def project_fock(p, n, quad=DEFAULT_QUAD, grid=None, cap=N_CAP):
    """Project mode 1 onto ``|n>`` by quadrature.

    ``grid`` optionally fixes the ``(x, weights)`` tabulation of mode 2;
    by default it is stretched to the output envelope.
    """
    check_cap(n, cap)
    if grid is None:
        grid = gh_grid(output_scale(p), quad.order_1d)
    x, w = grid
    phi = heralded_amplitude(p, n, x, quad.order_nd)
    prob = float(np.sum(w * np.abs(phi) ** 2))
    return ProjectionResult(p, n, prob, Wavefunction(x, w, phi), quad.order_nd)


def output_wavefunction_closed_form(p, n, x, probability=None, quad=DEFAULT_QUAD):
    """Heralded output state from the analytic Gaussian-Hermite integral.

    Branches: ``sqrt(a^2 - 1)`` and the square root of the power prefactor
    are principal values, so the result equals the quadrature projection up
    to a constant global phase. ``probability`` defaults to the quadrature
    heralding probability.
    """
    a, b, d = p.a, p.b, p.d
    if abs(a * a - 1.0) < 1e-12:
        raise SingularConfigurationError("a = +-1 is a branch point of the closed form")
    if probability is None:
        probability = project_fock(p, n, quad).probability
    if probability < HERALD_FLOOR:
        raise UnheraldableOutcomeError(f"outcome n={n} has probability {probability:.3g}", probability)
    x = np.asarray(x, dtype=float)
    det = a.real * d.real - b.real**2
    log_A = n * math.log(2.0) + log_factorial(n) + 0.5 * math.log(math.pi)
    pref = ((-1) ** n * det**0.25 / math.sqrt(math.exp(log_A) * probability)
            * np.sqrt(2.0 * (a - 1.0) ** n / (a + 1.0) ** (n + 1)))
    root = np.sqrt(a * a - 1.0)
    return pref * np.exp(-0.5 * x**2 * p.kappa) * hermite_eval(n, b * x / root)


def phase_align(reference, psi):
    """Rotate ``psi`` by the global phase maximizing ``Re <reference|psi>``."""
    ov = reference.inner(psi)
    phase = ov / abs(ov) if ov != 0 else 1.0
    return Wavefunction(psi.x, psi.weights, psi.values / phase)


def fidelity_pure(psi1, psi2, tol=1e-6):
    """``|<psi1|psi2>|^2`` for normalized tabulated states."""
    for psi in (psi1, psi2):
        if abs(psi.norm() - 1.0) > tol:
            raise NormalizationError(f"wavefunction norm {psi.norm():.12g} deviates from 1")
    return abs(psi1.inner(psi2)) ** 2


def heralded_fidelity(p, target, quad=DEFAULT_QUAD):
    """Heralding probability and fidelity with ``target`` for outcome ``target.n``."""
    grid = gh_grid(output_scale(p, target.R), quad.order_1d)
    res = project_fock(p, target.n, quad, grid, cap=target.cap)
    if not res.heraldable:
        return res.probability, math.nan
    sf = sf_tabulated(target, *grid)
    return res.probability, abs(sf.inner(res.conditional)) ** 2


def herald_batch(a, b, d, target, quad=DEFAULT_QUAD):
    """Vectorized heralding probability and fidelity over parameter arrays.

    Points that are not normalizable, or whose outcome is unheraldable,
    yield NaN fidelity; their probability is NaN or the computed value.
    """
    a, b, d = (np.asarray(v, dtype=complex).ravel() for v in (a, b, d))
    shape = np.broadcast(a, b, d).shape
    a, b, d = (np.broadcast_to(v, shape) for v in (a, b, d))
    valid = (a.real > 0) & (d.real > 0) & (a.real * d.real - b.real**2 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = np.where(valid, d - b**2 / (a + 1.0), 1.0)
    valid &= kappa.real > 0
    P = np.full(shape, np.nan)
    F = np.full(shape, np.nan)
    if not valid.any():
        return P, F
    av, bv, dv, kv = a[valid], b[valid], d[valid], kappa[valid]
    scale = np.maximum(1.0 / np.sqrt(kv.real), math.exp(-target.R))
    y, wy = gauss_hermite_rule(quad.order_1d).scaled()
    x2 = scale[:, None] * y[None, :]
    w2 = scale[:, None] * wy[None, :]
    log_norm = 0.25 * np.log(av.real * dv.real - bv.real**2) - 0.5 * math.log(math.pi)
    phi = kernels.project_one(target.n, av[:, None], bv[:, None] * x2,
                              log_norm[:, None] - 0.5 * dv[:, None] * x2**2,
                              gauss_hermite_rule(quad.order_nd))
    prob = np.sum(w2 * np.abs(phi) ** 2, axis=1)
    overlap = np.sum(w2 * phi * sf_wavefunction(target, x2), axis=1)
    fid = np.where(prob >= HERALD_FLOOR, np.abs(overlap) ** 2 / np.maximum(prob, HERALD_FLOOR), np.nan)
    P[valid] = prob
    F[valid] = fid
    return P, F


@dataclass(frozen=True)
class FockExpansion:
    """Truncated two-mode Fock coefficients ``C[m, n] = <m|_1 <n|_2 |Psi>``."""

    n_max: int
    coeffs: np.ndarray = field(repr=False)
    tail_mass: float

    def row(self, m):
        """Unnormalized mode-2 state left by detecting ``m`` photons in mode 1."""
        return self.coeffs[m]


def fock_expand(p, n_max, quad=DEFAULT_QUAD, threshold=1e-6, cap=N_CAP):
    """Expand ``Psi`` in the two-mode Fock basis up to ``n_max`` per mode.

    Mode 1 is integrated out with the projection kernel for all orders at
    once; the mode-2 overlaps use a grid matched to ``phi_n * Phi_m``.
    Orders are raised to at least ``2 n_max + 40`` (outer) and
    ``3 n_max + 40`` (inner). Raises :class:`TruncationError` when more than
    ``threshold`` of the norm lies beyond the cutoff.
    """
    check_cap(n_max, cap)
    k = p.kappa.real
    scale = math.sqrt(2.0 / (1.0 + k))
    # high Fock rows oscillate faster than the configured orders resolve
    x, w = gh_grid(scale, max(quad.order_1d, 2 * n_max + 40))
    rows = kernels.project_all(n_max, p.a, p.b * x, p.log_norm - 0.5 * p.d * x**2,
                               gauss_hermite_rule(max(quad.order_nd, 3 * n_max + 40)))
    basis = hermite_function_table(n_max, x)
    coeffs = (rows * w) @ basis.T
    tail = max(0.0, 1.0 - float(np.sum(np.abs(coeffs) ** 2)))
    if tail > threshold:
        raise TruncationError(f"tail mass {tail:.3g} above {threshold:.3g} at n_max={n_max}", tail)
    return FockExpansion(n_max, coeffs, tail)
