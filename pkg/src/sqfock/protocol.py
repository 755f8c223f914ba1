"""Entangler parameter maps, the universal-solution solver and resource accounting.

Two entanglers turn a pair of squeezed vacua ``r1, r2`` into a two-mode
Gaussian: a beam splitter with transmittance ``t`` or a controlled-Z gate
with weight ``g``. Choosing ``r1, r2`` so that

    d - b^2/(a+1) = e^{2R}    and    b^2/(a^2-1) = e^{2R}

makes every photon-number outcome ``n`` herald exactly the squeezed Fock
state ``(n, R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (InvalidParametersError, NoSolutionError,
                     SingularConfigurationError)
from .numerics import DEFAULT_QUAD, bracketed_max
from .states import TmegParams, gh_grid, output_scale, project_fock

DB_PER_NEPER = 20.0 / math.log(10.0)
BUDGET_DB = -15.0
"""Experimental squeezing frontier used by the budget checks."""

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class BeamSplitter:
    """Beam splitter with energy transmittance ``t`` (``t = cos(theta)``)."""

    t: float
    kind = "bs"

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        if not 0.0 < self.t < 1.0:
            raise InvalidParametersError(f"transmittance must lie in (0, 1), got {self.t}")

    @property
    def param(self):
        return self.t


@dataclass(frozen=True)
class ControlledZ:
    """Controlled-Z gate ``exp(i g x1 x2)``."""

    g: float
    kind = "cz"

    def __post_init__(self):
        object.__setattr__(self, "g", float(self.g))
        if not (self.g >= 0.0 and math.isfinite(self.g)):
            raise InvalidParametersError(f"CZ weight must be finite and non-negative, got {self.g}")

    @property
    def param(self):
        return self.g


def make_entangler(kind, param):
    if kind == "bs":
        return BeamSplitter(param)
    if kind == "cz":
        return ControlledZ(param)
    raise ValueError(f"unknown entangler kind {kind!r}")


class Residuals(NamedTuple):
    """Defects of the two universal conditions (complex in general)."""

    first: complex
    second: complex

    @property
    def norm(self):
        return max(abs(self.first), abs(self.second))


@dataclass(frozen=True)
class InputSolution:
    """Input squeezing ``r1, r2`` (positive: x-squeezed) and the verified residuals."""

    r1: float
    r2: float
    residuals: Residuals


@dataclass(frozen=True)
class CzDecomposition:
    """Bloch-Messiah factors of the CZ gate.

    ``s`` is the squeezing strength, ``tau`` and ``rho`` the beam-splitter
    amplitudes, and ``e^{2 r_an} = s`` the squeezing of each of the two
    ancillae.
    """

    g: float
    s: float
    tau: float
    rho: float
    r_an: float

    def factors(self):
        """The five 4x4 factors whose product is the CZ quadrature matrix.

        Quadrature order is ``(x1, x2, y1, y2)``. The phase shifters are the
        transposes of the commonly quoted ones and the squeezer is diagonal;
        with those the product is exactly :func:`cz_matrix`.
        """
        s, tau, rho = self.s, self.tau, self.rho
        shift_out = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0]], float)
        bs_out = np.array([[tau, rho, 0, 0], [rho, -tau, 0, 0],
                           [0, 0, tau, rho], [0, 0, rho, -tau]])
        squeeze = np.diag([math.sqrt(s), 1 / math.sqrt(s), 1 / math.sqrt(s), math.sqrt(s)])
        bs_in = np.array([[rho, tau, 0, 0], [tau, -rho, 0, 0],
                          [0, 0, rho, tau], [0, 0, tau, -rho]])
        shift_in = np.array([[1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0]], float)
        return shift_out, bs_out, squeeze, bs_in, shift_in

    def reconstruct(self):
        out = np.eye(4)
        for f in self.factors():
            out = out @ f
        return out

    def reconstruction_error(self):
        return float(np.max(np.abs(self.reconstruct() - cz_matrix(self.g))))


def cz_matrix(g):
    """Quadrature transfer matrix of ``exp(i g x1 x2)`` in ``(x1, x2, y1, y2)`` order."""
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, g, 1, 0], [g, 0, 0, 1]], float)


def cz_decompose(g, tol=1e-10):
    """Bloch-Messiah decomposition of the CZ gate with weight ``g >= 0``.

    The factor product is checked against :func:`cz_matrix`; a mismatch
    above ``tol`` raises ``ArithmeticError``.
    """
    g = ControlledZ(g).g
    s = 0.5 * (2.0 + g * g - g * math.sqrt(4.0 + g * g))
    dec = CzDecomposition(g, s, 1.0 / math.sqrt(1.0 + s), math.sqrt(s / (1.0 + s)),
                          0.5 * math.log(s))
    err = dec.reconstruction_error()
    if err > tol:
        raise ArithmeticError(f"CZ reconstruction error {err:.3g} at g={g}")
    return dec


def entangler_to_tmeg(e, r1, r2):
    """Two-mode Gaussian produced by entangler ``e`` acting on squeezed vacua."""
    u, v = math.exp(2.0 * r1), math.exp(2.0 * r2)
    if e.kind == "bs":
        t = e.t
        a = u * (1.0 - t) + v * t
        b = math.sqrt(t * (1.0 - t)) * (u - v)
        d = u * t + v * (1.0 - t)
    else:
        a, b, d = u, 1j * e.g, v
    return TmegParams(a, b, d)


def universal_residuals(p, R):
    """Defects of both universal conditions for target squeezing ``R``.

    Raises :class:`SingularConfigurationError` at ``a = -1``, or at
    ``a^2 = 1`` with ``b != 0``. For ``b = 0`` the second left side is
    identically zero (the output no longer depends on ``a``).
    """
    return _residuals(p.a, p.a - 1.0, p.b, p.d, R)


def _residuals(a, a_minus_1, b, d, R):
    a_sq_minus_1 = a_minus_1 * (a + 1.0)
    if abs(a + 1.0) < 1e-14 or (b != 0 and abs(a_sq_minus_1) < 1e-300):
        raise SingularConfigurationError(f"universal conditions are singular at a={a}")
    e2R = math.exp(2.0 * R)
    second = b * b / a_sq_minus_1 if b != 0 else 0j
    return Residuals(d - b * b / (a + 1.0) - e2R, second - e2R)


def _input_residuals(e, r1, r2, R):
    """Residuals with ``a - 1`` taken from the inputs, exact near ``a = 1``."""
    p = entangler_to_tmeg(e, r1, r2)
    if e.kind == "bs":
        a_minus_1 = math.expm1(2.0 * r1) * (1.0 - e.t) + math.expm1(2.0 * r2) * e.t
    else:
        a_minus_1 = math.expm1(2.0 * r1)
    return _residuals(p.a, a_minus_1, p.b, p.d, R)


def _bs_equations(t, E, r):
    """Universal conditions with denominators cleared, scaled by ``1/E``.

    ``d(a+1) - b^2 - E(a+1)`` and ``b^2 - E(a^2-1)`` are polynomial in the
    inputs, which keeps Newton steps finite across ``a = 1``.
    """
    u, v = math.exp(2.0 * r[0]), math.exp(2.0 * r[1])
    c = math.sqrt(t * (1.0 - t))
    a = u * (1.0 - t) + v * t
    b = c * (u - v)
    d = u * t + v * (1.0 - t)
    da = np.array([2.0 * u * (1.0 - t), 2.0 * v * t])
    db = np.array([2.0 * c * u, -2.0 * c * v])
    dd = np.array([2.0 * u * t, 2.0 * v * (1.0 - t)])
    f = np.array([d * (a + 1.0) - b * b - E * (a + 1.0), b * b - E * (a * a - 1.0)]) / E
    jac = np.vstack([dd * (a + 1.0) + (d - E) * da - 2.0 * b * db,
                     2.0 * b * db - 2.0 * E * a * da]) / E
    return f, jac


# offsets from (R/2, R/2); the r2 offsets keep seeds off u = v
_SEED_OFFSETS = [(i, j) for i in (-1.0, 0.0, 1.0) for j in (-1.05, 0.05, 1.05)]


def _newton(t, E, seed, max_iter=60):
    r = np.array(seed, dtype=float)
    stalled = 0
    with np.errstate(all="ignore"):
        try:
            f, jac = _bs_equations(t, E, r)
        except OverflowError:
            return r, math.inf
        norm = float(np.max(np.abs(f)))
        for _ in range(max_iter):
            if norm < 1e-15:
                break
            try:
                step = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            while lam > 1e-8:
                trial = r + lam * step
                try:
                    f_t, jac_t = _bs_equations(t, E, trial)
                    n_t = float(np.max(np.abs(f_t)))
                except OverflowError:
                    n_t = math.inf
                if n_t < norm:
                    # no root in reach if the residual only creeps down
                    stalled = stalled + 1 if n_t > 0.9 * norm else 0
                    r, f, jac, norm = trial, f_t, jac_t, n_t
                    break
                lam *= 0.5
            else:
                break
            if stalled >= 8:
                break
    return r, norm if math.isfinite(norm) else math.inf


def solve_inputs(e, target):
    """Input squeezing that makes ``e`` herald ``target`` exactly.

    The CZ branch is closed form. The beam-splitter branch runs damped
    Newton on ``(r1, r2)`` from nine seeds around ``(R/2, R/2)``; the first
    root whose residuals fall below ``1e-10`` is returned. Raises :class:`NoSolutionError`
    otherwise, with the per-seed residual landscape attached.
    """
    R = target.R
    E = math.exp(2.0 * R)
    if e.kind == "cz":
        g = e.g
        if not 0.0 < g < math.exp(R):
            raise NoSolutionError(f"CZ weight g={g} outside (0, e^R={math.exp(R):.6g})")
        a = math.sqrt(1.0 - g * g / E)
        r1 = 0.25 * math.log1p(-g * g / E)
        r2 = 0.5 * math.log(E - g * g / (a + 1.0))
        candidates = [(r1, r2)]
    else:
        landscape = []
        candidates = []
        for di, dj in _SEED_OFFSETS:
            seed = (0.5 * R + di, 0.5 * R + dj)
            r, norm = _newton(e.t, E, seed)
            landscape.append((seed, norm))
            if norm >= RESIDUAL_TOL:
                continue
            try:
                res = _input_residuals(e, r[0], r[1], R)
            except (InvalidParametersError, SingularConfigurationError):
                continue
            if res.norm < RESIDUAL_TOL:
                candidates.append((float(r[0]), float(r[1])))
                break
        if not candidates:
            raise NoSolutionError(f"no beam-splitter inputs for t={e.t}, R={R}", landscape)
    r1, r2 = candidates[0]
    try:
        res = _input_residuals(e, r1, r2, R)
    except (InvalidParametersError, SingularConfigurationError) as exc:
        raise NoSolutionError(f"degenerate solution for {e}: {exc}") from exc
    if res.norm >= RESIDUAL_TOL:
        raise NoSolutionError(f"residual {res.norm:.3g} for {e}, R={R}")
    return InputSolution(r1, r2, res)


def heralding_probability(e, target, quad=DEFAULT_QUAD, solution=None):
    """``P_n`` at the universal solution for ``e``."""
    sol = solution or solve_inputs(e, target)
    p = entangler_to_tmeg(e, sol.r1, sol.r2)
    grid = gh_grid(output_scale(p, target.R), quad.order_1d)
    return project_fock(p, target.n, quad, grid, cap=target.cap).probability


def parameter_range(kind, R):
    """Open search interval for ``t`` or ``g``."""
    if kind == "bs":
        return 0.0, 1.0
    if kind == "cz":
        return 0.0, math.exp(R)
    raise ValueError(f"unknown entangler kind {kind!r}")


def optimal_entangler(target, kind, quad=DEFAULT_QUAD, n_grid=64, tol=1e-6):
    """Entangler maximizing ``P_n`` under the universal solution.

    64-point midpoint grid over the feasible interval, then golden-section
    refinement to ``tol``. Ties go to the smaller parameter. Returns
    ``(entangler, probability)``.
    """
    lo, hi = parameter_range(kind, target.R)
    if kind == "bs" and target.R == 0.0:
        # E = 1 forces u = v = 1 and b = 0: no heralding at any t
        raise NoSolutionError(f"no feasible bs entangler for n={target.n}, R=0")

    def objective(x):
        try:
            return heralding_probability(make_entangler(kind, x), target, quad)
        except (NoSolutionError, InvalidParametersError, SingularConfigurationError):
            return -math.inf

    x, prob = bracketed_max(objective, lo, hi, n_grid=n_grid, tol=tol)
    if prob == -math.inf:
        raise NoSolutionError(f"no feasible {kind} entangler for n={target.n}, R={target.R}")
    return make_entangler(kind, x), prob


def energy_cost(e, sol):
    """Squeezing energy ``sum sinh^2 r`` of the inputs, plus two CZ ancillae."""
    cost = math.sinh(sol.r1) ** 2 + math.sinh(sol.r2) ** 2
    if e.kind == "cz":
        cost += 2.0 * math.sinh(cz_decompose(e.g).r_an) ** 2
    return cost


def squeezing_to_db(r):
    """``10 log10(e^{-2|r|})``; negative values are below vacuum noise."""
    return -DB_PER_NEPER * abs(r)


def required_squeezing(e, sol):
    """Squeezing parameters of every squeezed resource the setup consumes."""
    rs = [sol.r1, sol.r2]
    if e.kind == "cz":
        r_an = cz_decompose(e.g).r_an
        rs += [r_an, r_an]
    return rs


def max_input_squeezing(target, kind, quad=DEFAULT_QUAD):
    """Most demanding squeezing (dB) at the optimal entangler."""
    e, _ = optimal_entangler(target, kind, quad)
    sol = solve_inputs(e, target)
    return min(squeezing_to_db(r) for r in required_squeezing(e, sol))


def within_budget(db, budget_db=BUDGET_DB):
    return db >= budget_db
