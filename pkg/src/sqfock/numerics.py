"""Special functions, quadrature rules and 1-D search used across the package.

Everything here is a pure function of its arguments. Quadrature rules are
immutable and cached, so they can be shared freely between callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import erf, roots_hermite

from .errors import CapacityError, InvalidParametersError

N_CAP = 60
"""Default upper bound on Fock indices."""

_LOG_PI_QUARTER = 0.25 * math.log(math.pi)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def hermite_eval(n, x):
    """Physicists' Hermite polynomial :math:`H_n(x)`.

    Uses the three-term recurrence ``H_{k+1} = 2x H_k - 2k H_{k-1}``.
    Accepts real or complex scalars and arrays.
    """
    if n < 0:
        raise ValueError("Hermite degree must be non-negative")
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return h_prev[()] if h_prev.ndim == 0 else h_prev
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h[()] if np.ndim(h) == 0 else h


def log_factorial(n):
    return math.lgamma(n + 1.0)


def check_cap(n, cap=N_CAP):
    if n < 0:
        raise InvalidParametersError(f"Fock index must be non-negative, got {n}")
    if n > cap:
        raise CapacityError(f"Fock index {n} exceeds cap {cap}")


def fock_mode_function(n, x, cap=N_CAP):
    """Position-space Fock wavefunction :math:`\\langle x | n \\rangle`.

    The normalization ``pi^{-1/4} 2^{-n/2} (n!)^{-1/2}`` is assembled in log
    space together with the Gaussian factor, so large ``n`` and ``|x|`` do not
    overflow before the final exponentiation.
    """
    check_cap(n, cap)
    x = np.asarray(x, dtype=float)
    h = hermite_eval(n, x)
    log_norm = -_LOG_PI_QUARTER - 0.5 * n * math.log(2.0) - 0.5 * log_factorial(n)
    with np.errstate(divide="ignore"):
        log_mag = log_norm - 0.5 * x**2 + np.log(np.abs(h))
    out = np.sign(h) * np.exp(log_mag)
    return out[()] if out.ndim == 0 else out


def hermite_function_table(n_max, x):
    """Rows ``0..n_max`` of Fock wavefunctions evaluated at ``x``.

    Built from the orthonormal recurrence, which stays bounded where the
    plain polynomial grows.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = np.exp(-_LOG_PI_QUARTER - 0.5 * x**2)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for k in range(1, n_max):
        table[k + 1] = (math.sqrt(2.0 / (k + 1)) * x * table[k]
                        - math.sqrt(k / (k + 1)) * table[k - 1])
    return table


def erf_eval(x):
    """Error function (delegates to :func:`scipy.special.erf`)."""
    return erf(x)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gaussian quadrature rule.

    For ``kind == "gauss-hermite"`` the weights belong to the weight function
    ``exp(-x^2)``; :meth:`integrate` and :meth:`scaled` fold that factor back
    in so callers integrate plain functions on the real line.
    """

    kind: str
    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    lo: float = -math.inf
    hi: float = math.inf

    @property
    def plain_weights(self):
        if self.kind == "gauss-hermite":
            # log space: weights underflow where exp(x^2) overflows
            out = np.zeros_like(self.weights)
            pos = self.weights > 0
            out[pos] = np.exp(np.log(self.weights[pos]) + self.nodes[pos] ** 2)
            return out
        return self.weights

    def scaled(self, scale=1.0, center=0.0):
        """Nodes ``center + scale * x_i`` and matching plain weights."""
        if self.kind != "gauss-hermite":
            raise ValueError("only Gauss-Hermite rules are rescaled")
        return center + scale * self.nodes, scale * self.plain_weights

    def integrate(self, f, scale=1.0, center=0.0):
        if self.kind == "gauss-hermite":
            x, w = self.scaled(scale, center)
        else:
            x, w = self.nodes, self.weights
        return np.sum(w * f(x))


@lru_cache(maxsize=None)
def gauss_hermite_rule(order):
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    x, w = roots_hermite(order)
    return QuadratureRule("gauss-hermite", order, _frozen(x), _frozen(w))


@lru_cache(maxsize=None)
def gauss_legendre_rule(order, lo=-1.0, hi=1.0):
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"bad integration interval [{lo}, {hi}]")
    y, w = leggauss(order)
    half = 0.5 * (hi - lo)
    return QuadratureRule("gauss-legendre", order,
                          _frozen(lo + half * (y + 1.0)), _frozen(half * w),
                          float(lo), float(hi))


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature orders used by the physics layers.

    ``order_1d`` tabulates single-mode wavefunctions, ``order_nd`` is used per
    axis for nested 2-D/3-D integrals and ``order_loss`` per axis for the
    Gauss-Legendre averages over input squeezing.
    """

    order_1d: int = 120
    order_nd: int = 80
    order_loss: int = 64

    def __post_init__(self):
        for name in ("order_1d", "order_nd", "order_loss"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2")

    @classmethod
    def from_order(cls, order):
        """Scale all orders from a single 1-D order (120 gives the defaults)."""
        return cls(order, max(2, math.ceil(2 * order / 3)),
                   max(2, math.ceil(8 * order / 15)))

    def doubled(self):
        return QuadConfig(2 * self.order_1d, 2 * self.order_nd, 2 * self.order_loss)


DEFAULT_QUAD = QuadConfig()


def gaussian_scales(precision):
    """Per-axis Gauss-Hermite scales for an envelope ``exp(-v^T K v)``.

    Returns ``sqrt(diag(K^{-1}))``, i.e. the node scale that matches the
    weight ``exp(-y^2)`` to the widest marginal of the envelope.
    """
    k = np.atleast_2d(np.asarray(precision, dtype=float))
    return np.sqrt(np.diag(np.linalg.inv(k)))


def golden_section_max(f, lo, hi, tol=1e-6):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    On exact ties the left point is kept, so flat plateaus resolve toward
    the smaller argument.
    """
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def bracketed_max(f, lo, hi, n_grid=64, tol=1e-6, rel_tie=1e-12, zoom=8, min_feasible=8,
                  refine_tie=1e-9):
    """Coarse grid followed by golden-section refinement.

    ``f`` may return ``-inf`` for infeasible arguments. Grid points are cell
    midpoints of ``(lo, hi)``; a later point replaces the incumbent only if
    it is better by more than ``rel_tie`` (relative), so ties go to the
    smaller argument. When fewer than ``min_feasible`` grid points are
    feasible, a new grid is laid over each run of feasible cells (or, if
    none is feasible, over the two end cells), at most ``zoom`` levels deep;
    the refined runs are compared with the looser ``refine_tie``. Returns
    ``(x, f(x))``; ``f(x)`` is ``-inf`` when nothing feasible was found.
    """
    step = (hi - lo) / n_grid
    grid = lo + step * (np.arange(n_grid) + 0.5)
    values = [f(float(x)) for x in grid]
    feasible = [i for i, v in enumerate(values) if v != -math.inf]
    if len(feasible) < min_feasible and zoom > 0:
        if feasible:
            clusters = [[feasible[0]]]
            for i in feasible[1:]:
                if i == clusters[-1][-1] + 1:
                    clusters[-1].append(i)
                else:
                    clusters.append([i])
            spans = [(max(lo, grid[c[0]] - step), min(hi, grid[c[-1]] + step)) for c in clusters]
        else:
            spans = [(lo, lo + step), (hi - step, hi)]
        best = (float(grid[0]), -math.inf)
        for a, b in spans:
            cand = bracketed_max(f, a, b, n_grid, tol, rel_tie, zoom - 1, min_feasible, refine_tie)
            # refined maxima carry O(tol^2) error; compare them with refine_tie
            if best[1] == -math.inf or cand[1] > best[1] + refine_tie * max(abs(best[1]), 1.0):
                best = cand
        if best[1] > -math.inf or not feasible:
            return best
    best_i, best_f = -1, -math.inf
    for i in feasible:
        if best_i < 0 or values[i] > best_f + rel_tie * max(abs(best_f), 1.0):
            best_i, best_f = i, values[i]
    if best_i < 0:
        return float(grid[0]), -math.inf
    a = max(lo, grid[best_i] - step)
    b = min(hi, grid[best_i] + step)
    # keep the open ends of the domain out of the evaluation set
    eps = 1e-9 * (hi - lo)
    x, fx = golden_section_max(f, a + eps if a == lo else a,
                               b - eps if b == hi else b, tol)
    if fx >= best_f:
        return x, fx
    return float(grid[best_i]), best_f
