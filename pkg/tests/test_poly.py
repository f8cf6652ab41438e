import random

import pytest

from starquant.poly import MultiPoly, quadratic_form
from starquant.scalars import (
    MU,
    PS_ONE,
    GaussianRational,
    ParamScalar,
    gr,
    rat,
)

Z2 = lambda j: MultiPoly.variable(2, j)


def rand_poly(rng, n, max_deg=4, max_terms=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * n
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(n)] += 1
        coef = GaussianRational(rat(rng.randint(-4, 4), rng.randint(1, 3)))
        key = tuple(exps)
        ps = ParamScalar.from_gaussian(coef)
        terms[key] = terms[key] + ps if key in terms else ps
    return MultiPoly(n, terms)


def test_derivative_power_rule():
    z0, z1 = Z2(0), Z2(1)
    assert (z0 * z0 * z1).derivative(0) == (z0 * z1).scale_rat(rat(2))
    assert z0.derivative(1).is_zero()
    # d/dz0 (z0^3 + mu z0) = 3 z0^2 + mu, term by term
    f = z0 ** 3 + z0.scale(MU)
    assert f.derivative(0) == (z0 ** 2).scale_rat(rat(3)) + MultiPoly.const(2, MU)


def test_derivative_index_error():
    with pytest.raises(IndexError):
        Z2(0).derivative(2)
    with pytest.raises(IndexError):
        Z2(0).derivative(-1)


def test_shift_examples():
    z0, z1 = Z2(0), Z2(1)
    c = ParamScalar.from_rat(5, 3)
    zero = ParamScalar.from_rat(0)
    assert z0.shift([c, zero]) == z0 + MultiPoly.const(2, c)
    # (z0 + c)^2 = z0^2 + 2c z0 + c^2
    assert (z0 ** 2).shift([c, zero]) == (
        z0 ** 2 + z0.scale(c.scale_rat(2)) + MultiPoly.const(2, c * c)
    )
    a, b = ParamScalar.from_rat(2), MU
    expected = z0 * z1 + z0.scale(b) + z1.scale(a) + MultiPoly.const(2, a * b)
    assert (z0 * z1).shift([a, b]) == expected


def test_shift_length_mismatch():
    with pytest.raises(ValueError):
        Z2(0).shift([PS_ONE])


def test_shift_composition():
    rng = random.Random(99)
    for _ in range(20):
        n = rng.choice((2, 3))
        f = rand_poly(rng, n)
        a = [ParamScalar.from_rat(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(n)]
        b = [ParamScalar.from_rat(rng.randint(-2, 2)) for _ in range(n)]
        ab = [x + y for x, y in zip(a, b)]
        assert f.shift(a).shift(b) == f.shift(ab)


def test_leibniz_rule():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.choice((2, 3))
        f, g = rand_poly(rng, n), rand_poly(rng, n)
        for j in range(n):
            lhs = (f * g).derivative(j)
            rhs = f.derivative(j) * g + f * g.derivative(j)
            assert lhs == rhs


def test_ring_axioms_random_triples():
    rng = random.Random(31)
    for _ in range(200):
        n = 2
        a, b, c = (rand_poly(rng, n, 3, 3) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)


def test_grlex_serialization_is_canonical():
    z0, z1 = Z2(0), Z2(1)
    f = z1 + z0 ** 2 + z0 * z1 + MultiPoly.one(2)
    exps = [tuple(t["exps"]) for t in f.to_json()]
    assert exps == [(0, 0), (0, 1), (1, 1), (2, 0)]  # degree first, then lex
    assert MultiPoly.from_json(2, f.to_json()) == f


def test_mixed_param_monomial_splits_json_entries():
    z0 = Z2(0)
    f = z0.scale(PS_ONE + MU)
    entries = [t for t in f.to_json()]
    assert len(entries) == 2
    assert MultiPoly.from_json(2, entries) == f


def test_quadratic_form():
    A = ((gr(1), gr(2)), (gr(2), gr(-1)))
    q = quadratic_form(A, 2)
    z0, z1 = Z2(0), Z2(1)
    assert q == z0 ** 2 - z1 ** 2 + (z0 * z1).scale_rat(rat(4))


def test_text_output():
    z0, z1 = Z2(0), Z2(1)
    f = (z0 * z1) + MultiPoly.const(2, MU.scale_rat(rat(1, 2)))
    assert f.text() == "z0*z1 + 1/2*mu"
    assert MultiPoly.zero(2).text() == "0"
    assert (-(z0 ** 2)).text() == "-z0^2"


def test_variable_count_mismatch():
    with pytest.raises(ValueError):
        Z2(0) + MultiPoly.variable(3, 0)
    with pytest.raises(ValueError):
        Z2(0) * MultiPoly.variable(3, 0)


def test_degree_and_homogeneity():
    z0, z1 = Z2(0), Z2(1)
    assert MultiPoly.zero(2).degree() == -1
    assert (z0 * z1 + z0 ** 2).degree() == 2
    assert (z0 * z1 + z0 ** 2).is_homogeneous()
    assert not (z0 + z0 ** 2).is_homogeneous()
