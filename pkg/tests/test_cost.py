import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from posbuild.closed_forms import best_response_risk_neutral, equilibrium_pair, passive, risk_neutral
from posbuild.cost import (
    Perspective,
    TrigTable,
    assemble_cost,
    assemble_cost_a,
    assemble_cost_b,
    cross_sum,
    cross_weights,
    evaluate,
    gradient,
    quadrature_cost,
    strategy_costs,
    trig_integral,
)
from posbuild.exceptions import DomainError, ShapeError
from posbuild.strategy import StrategyCoeffs, convex_combine, fit_from_function

small = arrays(float, 6, elements=st.floats(-0.3, 0.3))


# trig table ------------------------------------------------------------------------

def test_trig_examples():
    assert trig_integral("sin", 1) == pytest.approx(2 / np.pi)
    assert trig_integral("sin", 2) == 0.0
    assert trig_integral("t_cos", 2) == 0.0
    assert trig_integral("cos_sin", 1, 2) == pytest.approx(4 / (3 * np.pi))
    assert trig_integral("cos_sin", 1, 2) == pytest.approx(0.42441, abs=1e-5)


def test_trig_errors():
    with pytest.raises(DomainError):
        trig_integral("tan", 1)
    with pytest.raises(DomainError):
        trig_integral("sin", -1)


def test_trig_table_matches_symbolic_integrals():
    sympy = pytest.importorskip("sympy")
    t = sympy.symbols("t")
    pi = sympy.pi
    table = TrigTable(6)
    for n in range(0, 7):
        assert table("sin", n) == pytest.approx(float(sympy.integrate(sympy.sin(n * pi * t), (t, 0, 1))), abs=1e-14)
        assert table("cos", n) == pytest.approx(float(sympy.integrate(sympy.cos(n * pi * t), (t, 0, 1))), abs=1e-14)
        assert table("t_cos", n) == pytest.approx(float(sympy.integrate(t * sympy.cos(n * pi * t), (t, 0, 1))), abs=1e-14)
        for m in range(0, 7):
            cc = sympy.integrate(sympy.cos(n * pi * t) * sympy.cos(m * pi * t), (t, 0, 1))
            cs = sympy.integrate(sympy.cos(n * pi * t) * sympy.sin(m * pi * t), (t, 0, 1))
            assert table("cos_cos", n, m) == pytest.approx(float(cc), abs=1e-14)
            assert table("cos_sin", n, m) == pytest.approx(float(cs), abs=1e-14)


def test_cross_weights_antisymmetric():
    w = cross_weights(9)
    assert np.array_equal(w, -w.T)
    assert w[0, 1] == pytest.approx(2 / 3)  # n=1, m=2
    assert w[0, 2] == 0.0


@given(arrays(float, st.integers(1, 25), elements=st.floats(-10, 10)))
def test_cross_sum_with_identical_vectors_is_exactly_zero(x):
    assert cross_sum(x, x) == 0.0


@given(small, small)
def test_cross_sum_is_antisymmetric(x, y):
    assert cross_sum(x, y) == -cross_sum(y, x)


# assembly examples ----------------------------------------------------------------

def test_cost_a_against_risk_neutral():
    qc = assemble_cost_a(np.zeros(8), kappa=1, lam=5)
    assert qc.constant == pytest.approx(9.0)
    assert qc.linear[0] == pytest.approx(-10 / np.pi)
    assert qc.linear[0] == pytest.approx(-3.18310, abs=1e-5)
    assert qc.linear[1] == 0.0
    assert np.allclose(qc.quad_diagonal, np.pi**2 * np.arange(1, 9) ** 2)
    assert evaluate(qc, np.zeros(8)) == qc.constant


def test_cost_a_scale_taken_from_strategy_coeffs():
    qc = assemble_cost_a(StrategyCoeffs.zeros(4, scale=5), kappa=1)
    assert qc.lam == 5 and qc.constant == pytest.approx(9.0)


def test_cost_a_kappa_zero_minimizer():
    b = np.array([0.2, -0.1, 0.05])
    qc = assemble_cost_a(b, kappa=0, lam=3)
    assert np.allclose(qc.minimizer(), -3 * b / 2)


def test_cost_b_examples():
    assert assemble_cost_b(np.zeros(5), 1, 5).constant == pytest.approx(45.0)
    assert assemble_cost_b(np.zeros(5), 25, 1).constant == pytest.approx(27.0)
    assert assemble_cost_a(np.zeros(5), 25, 1).constant == pytest.approx(27.0)
    assert np.allclose(assemble_cost_b(np.zeros(4), 2, 3).quad_diagonal, 9 * np.pi**2 * np.arange(1, 5) ** 2)


@given(small, st.floats(0, 10))
def test_symmetry_at_unit_lambda(a, kappa):
    ca, cb = strategy_costs(a, a, kappa, 1.0)
    assert ca == pytest.approx(cb, rel=1e-12, abs=1e-12)


def test_assembled_quad_is_diagonal_positive():
    for kappa in (0, 0.5, 25):
        for lam in (0.1, 1, 5):
            for p in "AB":
                qc = assemble_cost(p, np.linspace(-0.2, 0.2, 7), kappa, lam)
                assert np.count_nonzero(qc.quad - np.diag(np.diag(qc.quad))) == 0
                assert np.all(qc.quad_diagonal > 0)


def test_shape_errors():
    qc = assemble_cost_a(np.zeros(3), 1, 1)
    with pytest.raises(ShapeError):
        evaluate(qc, np.zeros(4))
    with pytest.raises(ShapeError):
        gradient(qc, np.zeros(2))
    with pytest.raises(ShapeError):
        assemble_cost_a(np.zeros(3), 1, 1, n_terms=4)
    with pytest.raises(DomainError):
        assemble_cost("C", np.zeros(3), 1, 1)
    with pytest.raises(DomainError):
        assemble_cost_b(np.zeros(3), 1, 0)


# evaluate / gradient ----------------------------------------------------------------

def test_best_response_cost_against_risk_neutral():
    n = np.arange(1, 61)
    x = np.where(n % 2 == 1, 10 / (np.pi**3 * n**3), 0.0)
    qc = assemble_cost_a(np.zeros(60), 1, 5)
    val = evaluate(qc, x)
    assert val < 9
    oracle = quadrature_cost(best_response_risk_neutral(1, 5), risk_neutral(), 1, 5, "A")
    # the tail beyond N modes contributes O(N^-3)
    assert val == pytest.approx(oracle, abs=1e-6)
    assert evaluate(assemble_cost_a(np.zeros(20), 1, 5), x[:20]) == pytest.approx(oracle, abs=1e-4)
    # exact value 9 - 50/96; the quoted "8.2" is the equilibrium cost, not this one
    assert oracle == pytest.approx(9 - 50 / 96, abs=1e-10)
    assert np.max(np.abs(gradient(qc, x))) < 1e-12


def test_gradient_at_zero_is_linear():
    qc = assemble_cost_b(np.linspace(0, 0.1, 5), 2, 3)
    assert np.array_equal(gradient(qc, np.zeros(5)), qc.linear)


def test_gradient_matches_finite_differences(rng):
    for _ in range(10):
        b = rng.uniform(-0.3, 0.3, 10)
        x = rng.uniform(-0.3, 0.3, 10)
        for p in "AB":
            qc = assemble_cost(p, b, rng.uniform(0, 5), rng.uniform(0.5, 5))
            h = 1e-6
            fd = np.array([(evaluate(qc, x + h * e) - evaluate(qc, x - h * e)) / (2 * h) for e in np.eye(10)])
            assert np.max(np.abs(fd - gradient(qc, x))) < 1e-8 * max(1, np.max(np.abs(fd)))


def test_cost_is_affine_in_a_convex_combination_of_opponents(rng):
    for _ in range(10):
        a, b1, b2 = (rng.uniform(-0.3, 0.3, 8) for _ in range(3))
        g, kappa, lam = rng.uniform(), rng.uniform(0, 5), rng.uniform(0.5, 5)
        mix = convex_combine(StrategyCoeffs(b1), StrategyCoeffs(b2), g).coeffs
        for p in "AB":
            lhs = evaluate(assemble_cost(p, mix, kappa, lam), a)
            rhs = g * evaluate(assemble_cost(p, b1, kappa, lam), a) + (1 - g) * evaluate(assemble_cost(p, b2, kappa, lam), a)
            assert lhs == pytest.approx(rhs, abs=1e-10)


# quadrature oracle --------------------------------------------------------------------

def test_quadrature_cost_examples():
    assert quadrature_cost(risk_neutral(), risk_neutral(), 1, 5, "A") == pytest.approx(9.0, abs=1e-10)
    for p in "AB":
        assert quadrature_cost(lambda t: t, lambda t: t, 25, 1, p) == pytest.approx(27.0, abs=1e-6)
    a_eq, b_eq = equilibrium_pair(1, 5)
    assert quadrature_cost(a_eq, b_eq, 1, 5, "A") == pytest.approx(8.2, rel=0.01)
    assert quadrature_cost(a_eq, b_eq, 1, 5, Perspective.B) == pytest.approx(46.2, rel=0.01)


def test_quadrature_cost_finite_difference_rate():
    # plain lambdas have no derivative attribute, so central differences are used
    f = passive("risk_averse", 2)
    g = passive("eager", 2)
    with_rate = quadrature_cost(f, g, 2, 3, "B")
    without = quadrature_cost(lambda t: f(t), lambda t: g(t), 2, 3, "B")
    assert with_rate == pytest.approx(without, abs=1e-6)


@given(small, small, st.sampled_from([0.0, 0.5, 5.0]), st.sampled_from([0.5, 1.0, 5.0]), st.sampled_from("AB"))
def test_assembly_matches_quadrature_oracle(a, b, kappa, lam, p):
    own, opp = (a, b) if p == "A" else (b, a)
    assembled = evaluate(assemble_cost(p, opp, kappa, lam), own)
    oracle = quadrature_cost(StrategyCoeffs(a), StrategyCoeffs(b), kappa, lam, p)
    assert assembled == pytest.approx(oracle, abs=1e-6)


def test_truncation_gap_shrinks_with_n():
    a_fn, b_fn = passive("risk_averse", 2), passive("eager", 3)
    kappa, lam = 2.0, 3.0
    exact = quadrature_cost(a_fn, b_fn, kappa, lam, "A")
    gaps = []
    for n in (5, 10, 20, 35, 50):
        a, b = fit_from_function(a_fn, n), fit_from_function(b_fn, n)
        gaps.append(abs(evaluate(assemble_cost_a(b.coeffs, kappa, lam), a.coeffs) - exact))
    assert all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3
