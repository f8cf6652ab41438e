import random

import pytest

from starquant.errors import PreconditionError
from starquant.poly import MultiPoly
from starquant.scalars import (
    GR_I,
    HALF_MU,
    MU,
    MU_INV,
    PARAM_INDEX,
    GaussianRational,
    ParamScalar,
    gr,
    rat,
)
from starquant.series import TruncSeries
from starquant.star import (
    OrderingK,
    StarContext,
    exp_linear_product,
    intertwine,
    ode_star_exponential,
    standard_j,
    star,
    star_commutator,
    star_k_ordered,
    star_terms,
)
from starquant.verify import rand_antisym, rand_poly


def simple_ctx() -> StarContext:
    lam = ((gr(0), gr(1)), (gr(-1), gr(0)))
    return StarContext.constant(lam, HALF_MU)


def zvars(n):
    return [MultiPoly.variable(n, j) for j in range(n)]


def rand_symmetric_k(rng, n) -> OrderingK:
    rows = [[gr(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = gr(rng.randint(-2, 2), rng.randint(1, 2))
            rows[i][j] = v
            rows[j][i] = v
    return OrderingK(tuple(tuple(r) for r in rows))


def test_star_basic_example():
    z0, z1 = zvars(2)
    ctx = simple_ctx()
    assert star(ctx, z0, z1) == z0 * z1 + MultiPoly.const(2, HALF_MU)


def test_star_unit_and_zero_lambda():
    rng = random.Random(3)
    ctx = simple_ctx()
    zero_ctx = StarContext.constant(((gr(0), gr(0)), (gr(0), gr(0))), HALF_MU)
    for _ in range(10):
        f = rand_poly(rng, 2)
        g = rand_poly(rng, 2)
        assert star(ctx, f, MultiPoly.one(2)) == f
        assert star(ctx, MultiPoly.one(2), f) == f
        assert star(zero_ctx, f, g) == f * g


def test_commutators():
    z0, z1 = zvars(2)
    ctx = simple_ctx()
    assert star_commutator(ctx, z0, z1) == MultiPoly.const(2, MU)
    f = z0 * z0 * z1 + z1
    assert star_commutator(ctx, f, f).is_zero()
    # Weyl-algebra convention: [u, v] = -i hbar (J entry 0,1 is -1)
    w = StarContext.weyl(1)
    minus_ih = ParamScalar.param("hbar", 1, -GR_I)
    assert star_commutator(w, z0, z1) == MultiPoly.const(2, minus_ih)


def test_k_ordered_examples():
    z0, z1 = zvars(2)
    w = StarContext.weyl(1)
    k0 = OrderingK.normal(1)
    ih = ParamScalar.param("hbar", 1, GR_I)
    assert star_k_ordered(w, k0, z0, z1) == z0 * z1
    assert star_k_ordered(w, k0, z1, z0) == z0 * z1 + MultiPoly.const(2, ih)
    # K = 0 reduces to the plain product
    rng = random.Random(8)
    kw = OrderingK.weyl(2)
    for _ in range(5):
        f, g = rand_poly(rng, 2, 3, 3), rand_poly(rng, 2, 3, 3)
        assert star_k_ordered(w, kw, f, g) == star(w, f, g)


def test_k_ordered_preconditions():
    z0 = MultiPoly.variable(2, 0)
    zero = MultiPoly.zero(2)
    poly_ctx = StarContext(2, ((zero, z0), (-z0, zero)), HALF_MU)
    with pytest.raises(PreconditionError):
        star_k_ordered(poly_ctx, OrderingK.weyl(2), z0, z0)
    with pytest.raises(PreconditionError):
        OrderingK(((gr(0), gr(1)), (gr(2), gr(0))))


def test_intertwine_examples():
    z0, z1 = zvars(2)
    k0 = OrderingK.normal(1)
    c = MultiPoly.const(2, ParamScalar.from_rat(7, 2))
    assert intertwine(k0, c) == c
    ih_half = ParamScalar.param("hbar", 1, GaussianRational(0, rat(1, 2)))
    assert intertwine(k0, z0 * z1) == z0 * z1 + MultiPoly.const(2, ih_half)


def test_intertwiner_homomorphism_identity():
    # conjugation by the intertwiner converts the plain product into the
    # K-ordered product (the displayed identity, tested verbatim)
    rng = random.Random(17)
    w = StarContext.weyl(1)
    minus_quarter = ParamScalar.param("hbar", 1, GaussianRational(0, rat(-1, 4)))
    for _ in range(10):
        f, g = rand_poly(rng, 2, 3, 3), rand_poly(rng, 2, 3, 3)
        kmat = rand_symmetric_k(rng, 2)
        tf = intertwine(kmat, f, minus_quarter)
        tg = intertwine(kmat, g, minus_quarter)
        assert intertwine(kmat, star(w, tf, tg)) == star_k_ordered(w, kmat, f, g)


def test_intertwine_inverse_pair():
    rng = random.Random(29)
    minus_quarter = ParamScalar.param("hbar", 1, GaussianRational(0, rat(-1, 4)))
    for _ in range(5):
        f = rand_poly(rng, 2, 4, 3)
        kmat = rand_symmetric_k(rng, 2)
        assert intertwine(kmat, intertwine(kmat, f, minus_quarter)) == f


def test_exp_linear_product():
    z0, z1 = zvars(2)
    ctx = StarContext.weyl(1)
    k = OrderingK.weyl(2)
    s = ParamScalar.param("tau")
    pre, shifted = exp_linear_product(ctx, k, (gr(0), gr(1)), s, z0, "left")
    # shift vector (s/2)(0,1)J = (s/2, 0), so u goes to u + s/2
    assert shifted == z0 + MultiPoly.const(2, s.scale_rat(rat(1, 2)))
    assert pre.sign == 1 and pre.scale == s
    # s = 0 leaves f unchanged
    _, unchanged = exp_linear_product(
        ctx, k, (gr(0), gr(1)), ParamScalar.from_rat(0), z0, "right"
    )
    assert unchanged == z0
    # constants are unchanged by any shift
    c = MultiPoly.const(2, MU)
    _, out = exp_linear_product(ctx, k, (gr(1), gr(1)), s, c, "left")
    assert out == c
    # with K = K0: -K0+J = [[0,-2],[0,0]], so a = (0,1) gives no shift on u
    k0 = OrderingK.normal(1)
    _, right = exp_linear_product(ctx, k0, (gr(0), gr(1)), s, z0, "right")
    assert right == z0
    # K0+J = [[0,0],[2,0]]: a = (0,1) shifts u by s but leaves v alone
    _, left = exp_linear_product(ctx, k0, (gr(0), gr(1)), s, z1, "left")
    assert left == z1
    _, left_u = exp_linear_product(ctx, k0, (gr(0), gr(1)), s, z0, "left")
    assert left_u == z0 + MultiPoly.const(2, s)


def test_ode_star_exponential_trivial_cases():
    ctx = simple_ctx()
    assert ode_star_exponential(ctx, MultiPoly.zero(2), 6) == TruncSeries.one(2, 6)
    # commutative limit: lambda = 0 gives the pointwise exponential of t*h
    zero_ctx = StarContext.constant(((gr(0), gr(0)), (gr(0), gr(0))), HALF_MU)
    h = MultiPoly.variable(2, 0) ** 2
    F = ode_star_exponential(zero_ctx, h, 6)
    fact = 1
    for k in range(7):
        if k:
            fact *= k
        assert F.coeffs[k] == (h ** k).scale_rat(rat(1, fact))


def test_ode_star_exponential_quadratic_recursion():
    # H = (z0^2 + z1^2)/mu with the basic context: the recursion itself is
    # the oracle; its first two steps have hand-expanded values
    ctx = simple_ctx()
    z0, z1 = zvars(2)
    h = (z0 ** 2 + z1 ** 2).scale(MU_INV)
    F = ode_star_exponential(ctx, h, 4)
    assert F.coeffs[1] == h
    assert F.coeffs[2] == (h * h + MultiPoly.one(2)).scale_rat(rat(1, 2))
    assert F.coeffs[2] == star(ctx, h, F.coeffs[1]).scale_rat(rat(1, 2))


def test_star_terms_grading_and_first_order():
    rng = random.Random(21)
    mu_slot = PARAM_INDEX["mu"]
    for n in (2, 4):
        lam = rand_antisym(rng, n)
        ctx = StarContext.constant(lam.rows, HALF_MU)
        scal = ctx.scalar_entries()
        checked = 0
        while checked < 6:
            f = rand_poly(rng, n, 4, 1)
            g = rand_poly(rng, n, 4, 1)
            if f.is_zero() or g.is_zero():
                continue
            checked += 1
            p, q = f.degree(), g.degree()
            terms = star_terms(ctx, f, g)
            assert terms[0] == f * g
            # independent first-order expansion
            first = MultiPoly.zero(n)
            for a in range(n):
                for b in range(n):
                    if scal[a][b]:
                        first = first + (
                            f.derivative(a) * g.derivative(b)
                        ).scale(scal[a][b])
            first = first.scale(HALF_MU)
            if len(terms) > 1:
                assert terms[1] == first
            else:
                assert first.is_zero()
            # contraction order k drops the degree by 2k and carries mu^k
            for k, term in enumerate(terms):
                if term.is_zero():
                    continue
                assert {sum(e) for e in term.terms} == {p + q - 2 * k}
                for coef in term.terms.values():
                    assert all(e[mu_slot] == k for e in coef.terms)


def test_associativity_smoke():
    rng = random.Random(77)
    for n in (2, 4):
        lam = rand_antisym(rng, n)
        ctx = StarContext.constant(lam.rows, HALF_MU)
        for _ in range(5):
            f, g, h = (rand_poly(rng, n, 3, 3) for _ in range(3))
            assert star(ctx, star(ctx, f, g), h) == star(ctx, f, star(ctx, g, h))


def test_jacobi_identity_for_commutator():
    rng = random.Random(5)
    ctx = simple_ctx()
    for _ in range(50):
        f, g, h = (rand_poly(rng, 2, 3, 2) for _ in range(3))
        total = (
            star_commutator(ctx, f, star_commutator(ctx, g, h))
            + star_commutator(ctx, g, star_commutator(ctx, h, f))
            + star_commutator(ctx, h, star_commutator(ctx, f, g))
        )
        assert total.is_zero()


def test_non_constant_lambda_contracted_form():
    # lambda^{01} = z0: one contraction of (z0, z1) picks up the factor z0
    z0, z1 = zvars(2)
    zero = MultiPoly.zero(2)
    ctx = StarContext(2, ((zero, z0), (-z0, zero)), HALF_MU)
    assert not ctx.constant_lambda
    assert star(ctx, z0, z1) == z0 * z1 + z0.scale(HALF_MU)
    f = z0 ** 2 * z1
    assert star(ctx, f, MultiPoly.one(2)) == f
    terms = star_terms(ctx, f, z1 ** 2)
    assert len(terms) <= min(f.degree(), 2) + 1


def test_context_validation():
    z0 = MultiPoly.variable(2, 0)
    zero = MultiPoly.zero(2)
    with pytest.raises(PreconditionError):
        StarContext(2, ((zero, z0), (z0, zero)), HALF_MU)  # not antisymmetric
    with pytest.raises(PreconditionError):
        StarContext.constant(
            ((gr(0), gr(1)), (gr(-1), gr(0))), ParamScalar.from_rat(0)
        )
    with pytest.raises(ValueError):
        star(simple_ctx(), MultiPoly.variable(3, 0), MultiPoly.variable(3, 1))


def test_standard_j_shape():
    j = standard_j(2)
    assert j[0][2] == -GaussianRational(1)
    assert j[2][0] == GaussianRational(1)
    assert all(not j[i][i] for i in range(4))


def test_context_json_roundtrip():
    ctx = StarContext.weyl(1)
    back = StarContext.from_json(ctx.to_json())
    assert back.n == ctx.n and back.coupling == ctx.coupling
    assert back.lam == ctx.lam
