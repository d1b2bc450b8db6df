import random
from fractions import Fraction

import numpy as np
import pytest

from neumann.errors import FactorizationMismatch, ZeroBranchPolynomial
from neumann.laxflow import assemble_lax
from neumann.phase import make_potential, make_state, random_rational_state, random_state
from neumann.ratpoly import BivarPoly, UniPoly
from neumann.spectral import (
    CurveDecomposition,
    char_poly,
    char_poly_float,
    classify,
    energy_identity,
    factor_curve,
    genus_report,
    invariants,
    is_regular,
    k_regularity,
    q_polynomial,
    wa_decomposition,
)

from oracles import PATTERNS, corpus, det_exact, lax_at, minus_lambda2_phi

lam, mu = BivarPoly.lam(), BivarPoly.mu()
z = UniPoly([0, 1])


def test_char_poly_diagonal():
    a = make_potential([1, 2], [1, 1])
    P = char_poly(assemble_lax(make_state([1, 0], [0, 0]), a))
    assert P == (mu - lam**2 + 1) * (mu - 2 * lam**2)


def test_char_poly_e1(e1):
    a, s = e1
    P = char_poly(assemble_lax(s, a))
    assert P == (mu - 2 * lam**2) * ((mu - lam**2 + 1) * (mu - lam**2) + lam**2)


@pytest.mark.parametrize("pattern", PATTERNS)
def test_char_poly_against_determinant(pattern):
    rng = random.Random(3)
    for a, s in corpus(pattern, count=5, seed=6):
        P = char_poly(assemble_lax(s, a))
        assert P.coeff(0, a.dim) == 1 and P.degree_mu == a.dim
        assert P.degree_lambda <= 2 * a.dim
        for _ in range(3):
            x = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
            y = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
            L = lax_at(s, a, x)
            shifted = [[(y if i == j else 0) - L[i][j] for j in range(a.dim)] for i in range(a.dim)]
            assert P(x, y) == det_exact(shifted)


@pytest.mark.parametrize("pattern", PATTERNS)
def test_weinstein_aronszajn(pattern):
    # det(z - L/lambda^2) / det(z - A) = 1 + (-lambda^2 Phi_z) / lambda^2
    rng = random.Random(8)
    for a, s in corpus(pattern, count=5, seed=7):
        for _ in range(2):
            x = Fraction(rng.randint(1, 9), rng.randint(1, 5))
            zz = Fraction(rng.randint(-30, 30), 7) + Fraction(1, 11)
            L = lax_at(s, a, x)
            n = a.dim
            num = det_exact([[(zz if i == j else 0) - L[i][j] / (x * x) for j in range(n)] for i in range(n)])
            den = det_exact([[(zz - a.diagonal[i]) if i == j else 0 for j in range(n)] for i in range(n)])
            assert num / den == 1 + minus_lambda2_phi(s, a, zz) / (x * x)


def test_wa_e1(e1):
    a, s = e1
    pf = wa_decomposition(s, a)
    assert pf.simple == {1: 1, 2: 0}
    assert pf.double == {1: 1}


def test_wa_e2(e2):
    a, s = e2
    pf = wa_decomposition(s, a)
    assert pf.simple == {1: 0, 2: 1}
    assert pf.double == {1: 0}


def test_wa_e3(e3):
    a, s = e3
    pf = wa_decomposition(s, a)
    assert pf.simple == {1: Fraction(7, 12), 4: Fraction(5, 12)}
    assert pf.double == {1: Fraction(1, 2)}


@pytest.mark.parametrize("pattern", PATTERNS)
def test_wa_matches_coordinate_sums(pattern):
    for a, s in corpus(pattern, count=10, seed=8):
        pf = wa_decomposition(s, a)
        for zz in (Fraction(-3, 7), Fraction(55, 3)):
            if zz in a.eigenvalues:
                continue
            assert pf(zz) == minus_lambda2_phi(s, a, zz)


def test_invariants_e1(e1):
    a, s = e1
    inv = invariants(s, a)
    assert inv.F == (1, 0) and inv.Ksq == (1,)
    assert [[int(x) for x in row] for row in inv.Kblocks[0]] == [[0, 1], [-1, 0]]
    assert inv.Ksq[0] == sum(x * x for x in inv.Kblocks[0].flat) / 2


def test_invariants_e2(e2):
    a, s = e2
    inv = invariants(s, a)
    assert inv.Ksq == (0,)
    assert all(x == 0 for x in inv.Kblocks[0].flat)


def test_invariants_e3(e3):
    a, s = e3
    inv = invariants(s, a)
    assert inv.Ksq == (Fraction(1, 2),)
    assert inv.F == (Fraction(7, 12), Fraction(5, 12))


def test_invariants_float_mirror():
    a = make_potential([1, 3, 4], [2, 3, 1])
    for seed in range(5):
        se = random_rational_state(a, seed)
        exact = invariants(se, a)
        approx = invariants(se.as_float(), a)
        assert np.allclose([float(x) for x in exact.F], approx.F, atol=1e-13)
        assert np.allclose([float(x) for x in exact.Ksq], approx.Ksq, atol=1e-13)


def test_energy_examples(e1, e2, e3):
    assert energy_identity(e1[1], e1[0]) == (1, 1)
    assert energy_identity(e2[1], e2[0]) == (1, 1)
    assert energy_identity(e3[1], e3[0]) == (Fraction(11, 8), Fraction(11, 8))


def test_q_polynomial(e1, e2):
    assert q_polynomial(e1[1], e1[0]) == z * z - 2 * z
    assert q_polynomial(e2[1], e2[0]) == (z - 1) ** 2


@pytest.mark.parametrize("pattern", PATTERNS)
def test_q_degree(pattern):
    for a, s in corpus(pattern, count=10, seed=9):
        Q = q_polynomial(s, a)
        assert Q.degree == a.k - 1 + a.r
        assert Q.leading == 1  # residues sum to one


def test_factor_curve_e1(e1):
    a, s = e1
    P = char_poly(assemble_lax(s, a))
    d = factor_curve(P, a, q_polynomial(s, a))
    assert P == (mu - 2 * lam**2) * ((mu - lam**2) ** 2 + mu)
    assert d.parabolas == (1,)
    assert d.hyper_numerator == z * (z - 2)
    assert d.point_component and d.lambda_exponent == 4


def test_factor_curve_equilibrium():
    a = make_potential([1, 2], [1, 1])
    s = make_state([1, 0], [0, 0])
    Q = q_polynomial(s, a)
    assert Q == z - 2
    d = factor_curve(char_poly(assemble_lax(s, a)), a, Q)
    assert d.parabolas == ()
    g = genus_report(d, a)
    assert g.cancellations == (2,)


def test_factor_curve_e3(e3):
    a, s = e3
    d = factor_curve(char_poly(assemble_lax(s, a)), a, q_polynomial(s, a))
    assert d.parabolas == (1,)
    assert d.z_exponents == {1: 1}


def test_factor_curve_mismatch(e1):
    a, s = e1
    P = char_poly(assemble_lax(s, a)) + lam**2 * mu
    with pytest.raises(FactorizationMismatch) as err:
        factor_curve(P, a, q_polynomial(s, a))
    assert err.value.location == (2, 1)


def test_genus_e1(e1):
    a, s = e1
    g = genus_report(factor_curve(char_poly(assemble_lax(s, a)), a, q_polynomial(s, a)), a)
    assert g.arithmetic_genus == 2
    assert g.squarefree_branch == z * (z - 2)
    assert g.geometric_genus == 0
    assert g.cancellations == (2,)


def test_genus_generic_n1():
    a = make_potential([1, 3], [1, 1])
    s = random_rational_state(a, 12)
    d = factor_curve(char_poly(assemble_lax(s, a)), a, q_polynomial(s, a))
    assert d.branch_poly.degree == 3
    g = genus_report(d, a)
    assert (g.arithmetic_genus, g.geometric_genus) == (1, 1)


def test_genus_e3(e3):
    a, s = e3
    g = genus_report(factor_curve(char_poly(assemble_lax(s, a)), a, q_polynomial(s, a)), a)
    assert g.arithmetic_genus == 2 == g.torus_dimension


def test_zero_branch():
    a = make_potential([1, 2], [1, 1])
    d = CurveDecomposition(True, (), UniPoly(), UniPoly([1]), UniPoly(), 2)
    with pytest.raises(ZeroBranchPolynomial):
        genus_report(d, a)


@pytest.mark.parametrize(
    "mults, sup, torus, n",
    [((1, 1, 1), False, 2, 2), ((2, 1), False, 2, 2), ((3, 1), True, 2, 3)],
)
def test_classify(mults, sup, torus, n):
    c = classify(make_potential(list(range(1, len(mults) + 1)), mults))
    assert (c.superintegrable, c.torus_dimension, c.degrees_of_freedom) == (sup, torus, n)


def rotation_block(*rates):
    n = 2 * len(rates)
    m = np.zeros((n, n), dtype=object)
    m[...] = Fraction(0)
    for i, r in enumerate(rates):
        m[2 * i, 2 * i + 1] = Fraction(r)
        m[2 * i + 1, 2 * i] = -Fraction(r)
    return m


def test_regular_blocks():
    assert is_regular(rotation_block(1))
    assert not is_regular(rotation_block(0))
    assert not is_regular(rotation_block(2, 2))
    assert is_regular(rotation_block(1, 2))


def test_k_regularity_states(e1, e2, e3):
    assert k_regularity(invariants(e1[1], e1[0])) == [(0, True)]
    assert k_regularity(invariants(e2[1], e2[0])) == [(0, False)]
    assert k_regularity(invariants(e3[1], e3[0])) == [(0, True)]
    # a rank-2 block of size 4 always has a double zero eigenvalue
    a = make_potential([1, 2], [4, 1])
    assert k_regularity(invariants(random_rational_state(a, 1), a)) == [(0, False)]


def test_char_poly_float_matches_exact():
    a = make_potential([1, 2, 3], [3, 2, 1])
    s = random_rational_state(a, 4)
    P = char_poly(assemble_lax(s, a))
    Pf = char_poly_float(assemble_lax(s.as_float(), a))
    dense = np.zeros_like(Pf)
    for (i, j), c in P.terms.items():
        dense[i, j] = float(c)
    assert np.allclose(Pf, dense, atol=1e-11, rtol=1e-12)


def test_char_poly_even_in_lambda():
    a = make_potential([1, 2, 3], [2, 1, 1])
    P = char_poly(assemble_lax(random_rational_state(a, 9), a))
    assert all(i % 2 == 0 for i, _ in P.terms)


def test_float_char_poly_conserved_random():
    from neumann.dynamics import integrate

    a = make_potential([1, 2, 5], [2, 1, 1])
    s = random_state(a, 1)
    tr = integrate(s, a, 1.0, 1e-3, 1000)
    P0 = char_poly_float(assemble_lax(tr.states[0], a))
    P1 = char_poly_float(assemble_lax(tr.states[-1], a))
    assert np.max(np.abs(P1 - P0)) <= 1e-5 * max(1.0, np.max(np.abs(P0)))
