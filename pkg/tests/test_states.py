import math

import numpy as np
import pytest

from sqfock.errors import (InvalidParametersError, NormalizationError,
                           SingularConfigurationError, TruncationError,
                           UnheraldableOutcomeError)
from sqfock.numerics import DEFAULT_QUAD, fock_mode_function, gauss_hermite_rule
from sqfock.states import (SFTarget, TmegParams, Wavefunction, fidelity_pure,
                           fock_expand, gh_grid, herald_batch,
                           heralded_fidelity, output_scale,
                           output_wavefunction_closed_form, phase_align,
                           project_fock, sf_tabulated, sf_wavefunction,
                           tmeg_wavefunction)


def random_params(rng, count):
    out = []
    while len(out) < count:
        a = complex(rng.uniform(0.3, 3.0), rng.uniform(-1, 1))
        d = complex(rng.uniform(0.3, 3.0), rng.uniform(-1, 1))
        lim = math.sqrt(a.real * d.real)
        b = complex(rng.uniform(-0.9, 0.9) * lim, rng.uniform(-1, 1))
        if abs(a * a - 1) > 0.05:
            out.append(TmegParams(a, b, d))
    return out


def cz_universal(g, R):
    E = math.exp(2 * R)
    a = math.sqrt(1 - g * g / E)
    return TmegParams(a, 1j * g, E - g * g / (a + 1))


def test_params_validation():
    with pytest.raises(InvalidParametersError):
        TmegParams(-1, 0, 1)
    with pytest.raises(InvalidParametersError):
        TmegParams(1, 2, 1)
    p = TmegParams(1, 0, 2)
    assert isinstance(p.a, complex)
    assert p.kappa == 2


def test_vacuum_wavefunction():
    p = TmegParams(1, 0, 1)
    assert tmeg_wavefunction(p, 0, 0) == pytest.approx(math.pi ** -0.5, abs=1e-12)
    x, w = gh_grid(1.0, 60)
    X1, X2 = np.meshgrid(x, x)
    assert np.sum(np.outer(w, w) * np.abs(tmeg_wavefunction(p, X1, X2)) ** 2) == pytest.approx(1, abs=1e-10)


def test_complex_wavefunction_normalized():
    p = TmegParams(math.exp(0.4), 0.2013j + 0.1, 1.3 - 0.4j)
    k = np.array([[p.a.real, p.b.real], [p.b.real, p.d.real]])
    s1, s2 = np.sqrt(np.diag(np.linalg.inv(k)))
    x1, w1 = gh_grid(s1, 80)
    x2, w2 = gh_grid(s2, 80)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    norm = np.sum(np.outer(w1, w2) * np.abs(tmeg_wavefunction(p, X1, X2)) ** 2)
    assert norm == pytest.approx(1, abs=1e-8)


def test_sf_wavefunction():
    x = np.linspace(-4, 4, 9)
    assert np.allclose(sf_wavefunction(SFTarget(0, 0), x), fock_mode_function(0, x))
    assert sf_wavefunction(SFTarget(1, 0.5), 0.0) == 0.0
    for n, R in [(0, 1.0), (2, -0.7), (5, 1.5)]:
        x, w = gh_grid(math.exp(-R), 120)
        assert np.sum(w * sf_wavefunction(SFTarget(n, R), x) ** 2) == pytest.approx(1, abs=1e-10)


def test_target_cap():
    with pytest.raises(Exception):
        SFTarget(61, 0.0)
    assert SFTarget(70, 0.0, cap=80).n == 70


def test_odd_outcome_of_product_state_is_unheraldable():
    res = project_fock(TmegParams(2.0, 0, 0.5), 1)
    assert res.probability < 1e-14
    assert not res.heraldable
    with pytest.raises(UnheraldableOutcomeError):
        res.conditional


def test_vacuum_heralds_vacuum():
    assert project_fock(TmegParams(1, 0, 1), 0).probability == pytest.approx(1, abs=1e-12)


def test_probability_completeness():
    p = TmegParams(1.8, 0.7, 1.5)
    probs = [project_fock(p, n).probability for n in range(40)]
    assert sum(probs) <= 1 + 1e-10
    assert sum(probs) == pytest.approx(1, abs=1e-8)


def test_conditional_is_normalized():
    res = project_fock(TmegParams(1.8, 0.7 + 0.2j, 1.5), 2)
    assert res.conditional.norm() == pytest.approx(1, abs=1e-10)
    x = res.amplitude.x[:5]
    assert np.allclose(res.conditional_amplitude(x), res.conditional.values[:5])


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_closed_form_matches_quadrature(n):
    for p in random_params(np.random.default_rng(100 + n), 5):
        res = project_fock(p, n)
        quad_state = res.conditional
        closed = Wavefunction(quad_state.x, quad_state.weights,
                              output_wavefunction_closed_form(p, n, quad_state.x, res.probability))
        aligned = phase_align(quad_state, closed)
        assert np.max(np.abs(aligned.values - quad_state.values)) < 1e-6


def test_closed_form_singular():
    with pytest.raises(SingularConfigurationError):
        output_wavefunction_closed_form(TmegParams(1.0, 0.3, 2.0), 1, np.zeros(3))


def test_closed_form_universal_solution_is_target():
    target = SFTarget(1, 1.0)
    p = cz_universal(2.5628206199, 1.0)
    x = np.linspace(-2, 2, 41)
    closed = output_wavefunction_closed_form(p, 1, x)
    sf = sf_wavefunction(target, x)
    phase = np.vdot(closed, sf) / abs(np.vdot(closed, sf))
    assert np.max(np.abs(closed * phase - sf)) < 1e-6


def test_two_mode_squeezed_vacuum_heralds_gaussian():
    r = 0.4
    p = TmegParams(math.cosh(2 * r), math.sinh(2 * r), math.cosh(2 * r))
    res = project_fock(p, 0)
    x = res.amplitude.x
    mag = np.abs(res.amplitude.values)
    peak = math.exp(p.log_norm) * math.pi ** -0.25 * math.sqrt(2 * math.pi / (1 + p.a.real))
    gauss = peak * np.exp(-0.5 * p.kappa.real * x**2)
    assert np.max(np.abs(mag - gauss)) < 1e-8


def test_fidelity_pure():
    x, w = gh_grid(1.0, 120)
    phi0 = Wavefunction(x, w, fock_mode_function(0, x).astype(complex))
    phi1 = Wavefunction(x, w, fock_mode_function(1, x).astype(complex))
    assert fidelity_pure(phi0, phi0) == pytest.approx(1, abs=1e-10)
    assert fidelity_pure(phi0, phi1) == pytest.approx(0, abs=1e-10)
    a = sf_tabulated(SFTarget(1, 1.0), x, w)
    b = sf_tabulated(SFTarget(1, 0.9), x, w)
    f = fidelity_pure(a, b)
    assert 0 < f < 1
    assert f == pytest.approx(fidelity_pure(b, a), abs=1e-10)
    with pytest.raises(NormalizationError):
        fidelity_pure(Wavefunction(x, w, 2 * phi0.values), phi0)


def test_fidelity_is_phase_blind():
    x, w = gh_grid(1.0, 60)
    phi = Wavefunction(x, w, fock_mode_function(2, x).astype(complex))
    rotated = Wavefunction(x, w, np.exp(0.7j) * phi.values)
    assert fidelity_pure(phi, rotated) == pytest.approx(1, abs=1e-12)


def test_mixed_grids_rejected():
    a = Wavefunction(*gh_grid(1.0, 20), np.ones(20))
    b = Wavefunction(*gh_grid(2.0, 20), np.ones(20))
    with pytest.raises(ValueError):
        a.inner(b)


def test_universal_solution_exactness():
    for n in (0, 1, 2, 3):
        P, F = heralded_fidelity(cz_universal(1.3, 0.6), SFTarget(n, 0.6))
        assert F == pytest.approx(1, abs=1e-8)


def test_output_scale():
    p = TmegParams(1, 0, 4)
    assert output_scale(p) == 0.5
    assert output_scale(p, R=-1) == pytest.approx(math.e)


def test_herald_batch_matches_pointwise():
    target = SFTarget(1, 0.5)
    ps = random_params(np.random.default_rng(5), 4)
    a, b, d = (np.array([getattr(p, k) for p in ps] + [complex(-1)]) for k in "abd")
    P, F = herald_batch(a, b, d, target)
    for i, p in enumerate(ps):
        P1, F1 = heralded_fidelity(p, target)
        assert P[i] == pytest.approx(P1, abs=1e-12)
        assert F[i] == pytest.approx(F1, abs=1e-12)
    assert np.isnan(P[-1]) and np.isnan(F[-1])


def test_fock_expand_vacuum():
    fe = fock_expand(TmegParams(1, 0, 1), 6)
    expect = np.zeros((7, 7))
    expect[0, 0] = 1
    assert np.max(np.abs(fe.coeffs - expect)) < 1e-10
    assert fe.tail_mass < 1e-10


@pytest.mark.parametrize("p", [TmegParams(1.8, 0.7, 1.5), cz_universal(1.3, 0.6),
                               TmegParams(0.9 + 0.3j, 0.2 - 0.4j, 1.4 - 0.2j)])
def test_fock_expand_parity_and_parseval(p):
    fe = fock_expand(p, 40)
    m, n = np.indices(fe.coeffs.shape)
    assert np.max(np.abs(fe.coeffs[(m + n) % 2 == 1])) < 1e-10
    assert np.sum(np.abs(fe.coeffs) ** 2) <= 1 + 1e-10
    assert np.sum(np.abs(fe.row(1)) ** 2) == pytest.approx(project_fock(p, 1).probability, abs=1e-8)


def test_fock_expand_truncation_error():
    with pytest.raises(TruncationError) as info:
        fock_expand(cz_universal(2.5, 1.0), 10)
    assert info.value.tail_mass > 1e-6


def test_fock_expand_high_order_stays_bounded():
    # strongly entangled CZ state whose high rows oscillate fast
    fe = fock_expand(cz_universal(1.6, 0.5), 100, threshold=1.0, cap=100)
    assert np.sum(np.abs(fe.coeffs) ** 2) <= 1 + 1e-10
