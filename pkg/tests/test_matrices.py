import random

import pytest

from starquant.errors import PreconditionError
from starquant.matrices import (
    MatSeries,
    SqMatrix,
    cayley,
    cayley_flow_residual,
    check_sp_pair,
    closed_form_vs_oracle,
    closed_star_exponential,
    expand_closed_form,
    first_divergence,
    g_flow_residual,
    inverse_cayley,
    mat_exp_series,
    q_flow_residual,
    riccati_1d,
    riccati_vs_moyal,
    solve_g,
    solve_q,
    tanh_series,
)
from starquant.poly import MultiPoly
from starquant.scalars import GR_ONE, PS_ZERO, ParamScalar, gr, rat
from starquant.series import TruncSeries
from starquant.verify import (
    rand_invertible_antisym,
    rand_square,
    rand_symmetric,
)

N = 8


def std_lam2() -> SqMatrix:
    return SqMatrix(((gr(0), gr(1)), (gr(-1), gr(0))))


# --- Cayley transform -------------------------------------------------------


def test_cayley_zero_and_nilpotent():
    assert cayley(SqMatrix.zero(2)) == SqMatrix.identity(2)
    x = SqMatrix(((gr(0), gr(1)), (gr(0), gr(0))))
    assert cayley(x) == SqMatrix(((gr(1), gr(-2)), (gr(0), gr(1))))
    assert inverse_cayley(SqMatrix.identity(2)) == SqMatrix.zero(2)
    assert inverse_cayley(cayley(x)) == x


def test_cayley_roundtrip_random():
    rng = random.Random(4)
    one = SqMatrix.identity(3)
    for _ in range(10):
        while True:
            g = rand_square(rng, 3)
            if (one + g).det() and (one + cayley(g)).det():
                break
        assert cayley(inverse_cayley(g)) == g


def test_cayley_singular_raises():
    bad = SqMatrix(((gr(-1), gr(0)), (gr(0), gr(3))))  # 1 + X singular
    with pytest.raises(PreconditionError):
        cayley(bad)


def test_check_sp_pair():
    lam = std_lam2()
    assert check_sp_pair(lam, SqMatrix.zero(2)) == {
        "lambda_x_symmetric": True,
        "cayley_preserves_form": True,
    }
    rng = random.Random(12)
    for n in (2, 4):
        lamn = rand_invertible_antisym(rng, n)
        x = rand_symmetric(rng, n) * lamn  # lam (S lam) is symmetric
        if not (SqMatrix.identity(n) + x).det():
            continue
        rep = check_sp_pair(lamn, x)
        assert rep["lambda_x_symmetric"] and rep["cayley_preserves_form"]
    # a witness where lambda X fails to be symmetric
    x_bad = SqMatrix(((gr(1), gr(2)), (gr(0), gr(1))))
    rep = check_sp_pair(lam, x_bad)
    assert not rep["lambda_x_symmetric"]


# --- matrix series ----------------------------------------------------------


def test_mat_exp_series_basics():
    zero = SqMatrix.zero(2)
    assert mat_exp_series(zero, GR_ONE, N) == MatSeries.identity(2, N)
    a = SqMatrix(((gr(1), gr(2)), (gr(0), gr(-1))))
    e = mat_exp_series(a, GR_ONE, N)
    em = mat_exp_series(a, -GR_ONE, N)
    assert e * em == MatSeries.identity(2, N)
    # defining flow: d/dt exp(at) = a exp(at)
    assert e.dt() == (MatSeries.from_matrix(a, N) * e).truncate(N - 1)


def test_mat_series_inverse_and_det():
    rng = random.Random(9)
    for _ in range(5):
        m0 = rand_square(rng, 3)
        if not m0.det():
            continue
        coeffs = [m0] + [rand_square(rng, 3) for _ in range(N)]
        m = MatSeries(3, N, coeffs)
        assert m * m.inverse() == MatSeries.identity(3, N)
        # det is multiplicative
        m2 = MatSeries(3, N, [SqMatrix.identity(3)] + [rand_square(rng, 3) for _ in range(N)])
        assert (m * m2).det() == m.det() * m2.det()


def test_solve_q_examples_and_residuals():
    a = SqMatrix(((gr(1), gr(1, 2)), (gr(-1), gr(0))))
    b = SqMatrix(((gr(1, 3), gr(0)), (gr(1), gr(-1, 2))))
    # a = 0: stationary at b
    qc = solve_q(SqMatrix.zero(2), b, N)
    assert all(c == (b if k == 0 else SqMatrix.zero(2)) for k, c in enumerate(qc.coeffs))
    # b = 0: the tanh flow
    q0 = solve_q(a, SqMatrix.zero(2), N)
    assert q0 == tanh_series(a, N)
    assert q_flow_residual(a, q0).is_zero()
    # generic initial data
    q = solve_q(a, b, N)
    assert q.coeffs[0] == b
    assert q_flow_residual(a, q).is_zero()
    assert cayley_flow_residual(a, q).is_zero()


def test_solve_q_singular_initial_data():
    b = SqMatrix(((gr(-1), gr(0)), (gr(0), gr(0))))
    with pytest.raises(PreconditionError):
        solve_q(SqMatrix.identity(2), b, N)
    with pytest.raises(PreconditionError):
        solve_g(SqMatrix.identity(2), b, N)


def test_solve_g_examples_and_residual():
    a = SqMatrix(((gr(1), gr(1, 2)), (gr(-1), gr(0))))
    zero = SqMatrix.zero(2)
    g0 = solve_g(zero, zero, N)
    assert g0 == TruncSeries.one(0, N)
    # nilpotent a with b = 0: det((e^{at}+e^{-at})/2) = det(1 + t^2 a^2/2...)
    # for a^2 = 0 the matrix is exactly the identity, so g = 1
    nil = SqMatrix(((gr(0), gr(1)), (gr(0), gr(0))))
    g_nil = solve_g(nil, zero, N)
    assert g_nil == TruncSeries.one(0, N)
    b = SqMatrix(((gr(1, 3), gr(0)), (gr(1), gr(-1, 2))))
    q = solve_q(a, b, N)
    g = solve_g(a, b, N)
    assert g.coeffs[0] == MultiPoly.one(0)
    assert g_flow_residual(a, q, g).is_zero()


def test_exp_cayley_tanh_identity():
    # exp(2ta) equals the Cayley transform of -tanh(ta), as matrix series
    rng = random.Random(15)
    for n in (2, 3):
        a = rand_square(rng, n)
        assert mat_exp_series(a, gr(2), N) == cayley(-tanh_series(a, N))


# --- closed-form star exponential -------------------------------------------


def test_closed_star_exponential_trivial_and_nilpotent():
    lam = std_lam2()
    amp, phase = closed_star_exponential(lam, SqMatrix.zero(2), N)
    assert amp == TruncSeries.one(0, N)
    assert phase == MatSeries.zero(2, N)
    # lam*A nilpotent of index 2: amplitude 1, phase exactly t*A
    a_mat = SqMatrix(((gr(0), gr(0)), (gr(0), gr(1))))
    amp2, phase2 = closed_star_exponential(lam, a_mat, N)
    assert amp2 == TruncSeries.one(0, N)
    expected = [SqMatrix.zero(2)] * (N + 1)
    expected[1] = a_mat
    assert phase2 == MatSeries(2, N, expected)


def test_closed_star_exponential_preconditions():
    lam = std_lam2()
    with pytest.raises(PreconditionError):
        closed_star_exponential(SqMatrix.identity(2), SqMatrix.identity(2), N)
    with pytest.raises(PreconditionError):
        closed_star_exponential(SqMatrix.zero(2), SqMatrix.identity(2), N)
    asym = SqMatrix(((gr(0), gr(1)), (gr(2), gr(0))))
    with pytest.raises(PreconditionError):
        closed_star_exponential(lam, asym, N)


def test_phase_matrix_symmetric_every_order():
    rng = random.Random(33)
    for n in (2, 4):
        lam = rand_invertible_antisym(rng, n)
        a_mat = rand_symmetric(rng, n)
        _, phase = closed_star_exponential(lam, a_mat, N)
        for m in phase.coeffs:
            assert m.is_symmetric()


def test_amplitude_squared_times_det_is_one():
    rng = random.Random(41)
    for n in (2, 4):
        lam = rand_invertible_antisym(rng, n)
        a_mat = rand_symmetric(rng, n)
        a = lam * a_mat
        amp, _ = closed_star_exponential(lam, a_mat, N)
        half = gr(1, 2)
        cosh = (
            mat_exp_series(a, GR_ONE, N) + mat_exp_series(a, -GR_ONE, N)
        ).scale(half)
        assert amp * amp * cosh.det() == TruncSeries.one(0, N)


def test_closed_form_matches_oracle():
    lam = std_lam2()
    for a_mat in (
        SqMatrix.identity(2),
        SqMatrix(((gr(2), gr(1, 2)), (gr(1, 2), gr(-1)))),
    ):
        assert closed_form_vs_oracle(lam, a_mat, N).passed


def test_expand_closed_form_identity_case():
    # lam = [[0,1],[-1,0]], A = I: amplitude sec t, phase tan t * identity
    lam = std_lam2()
    series = expand_closed_form(lam, SqMatrix.identity(2), 4)
    z0 = MultiPoly.variable(2, 0)
    z1 = MultiPoly.variable(2, 1)
    x = (z0 ** 2 + z1 ** 2).scale(ParamScalar.param("mu", -1))
    assert series.coeffs[0] == MultiPoly.one(2)
    assert series.coeffs[1] == x
    assert series.coeffs[2] == (x * x + MultiPoly.one(2)).scale_rat(rat(1, 2))


# --- one-variable Riccati reduction ------------------------------------------


def tan_sec_oracle(N: int):
    # independent oracle: tan and sec series from their power-series
    # definitions sin/cos with exact rationals
    from math import factorial

    sin = [rat(0)] * (N + 1)
    cos = [rat(0)] * (N + 1)
    for k in range(N + 1):
        if k % 2:
            sin[k] = rat((-1) ** ((k - 1) // 2), factorial(k))
        else:
            cos[k] = rat((-1) ** (k // 2), factorial(k))
    # divide: tan = sin/cos, sec = 1/cos by long division
    def divide(num):
        out = [rat(0)] * (N + 1)
        for k in range(N + 1):
            acc = num[k]
            for j in range(1, k + 1):
                acc -= cos[j] * out[k - j]
            out[k] = acc  # cos[0] = 1
        return out

    one = [rat(1)] + [rat(0)] * N
    return divide(sin), divide(one)


def test_riccati_1d_series_values():
    g, h = riccati_1d(gr(0), gr(0), gr(1), N)  # D = 1
    tan_c, sec_c = tan_sec_oracle(N)
    for k in range(N + 1):
        # h_k = tan_k * hbar^(k-1), g_k = sec_k * hbar^k (argument hbar*t)
        want_h = (
            PS_ZERO
            if not tan_c[k]
            else ParamScalar.param("hbar", k - 1, gr(1).scale(tan_c[k]))
        )
        want_g = (
            PS_ZERO
            if not sec_c[k]
            else ParamScalar.param("hbar", k, gr(1).scale(sec_c[k]))
        )
        assert h.coeffs[k].constant_coefficient() == want_h
        assert g.coeffs[k].constant_coefficient() == want_g


def test_riccati_1d_degenerate():
    g, h = riccati_1d(gr(0), gr(0), gr(0), N)
    t_series = TruncSeries.t_term(MultiPoly.one(0), 1, N)
    assert h == t_series
    assert g == TruncSeries.one(0, N)
    # D = 0 along a nontrivial direction too: a=1, b=1, c=1 gives D=0
    g2, h2 = riccati_1d(gr(1), gr(1), gr(1), N)
    assert h2 == t_series and g2 == TruncSeries.one(0, N)


def test_riccati_1d_flow_residuals():
    for (a, b, c) in ((gr(0), gr(0), gr(1)), (gr(1), gr(1), gr(0)), (gr(2), gr(-1), gr(1, 2))):
        d = c * c - a * b
        eps = ParamScalar.param("hbar", 2, d) if d else PS_ZERO
        g, h = riccati_1d(a, b, c, N)
        one = TruncSeries.one(0, N)
        h_res = h.dt() - (one + (h * h).scale(eps)).truncate(N - 1)
        assert h_res.is_zero()
        g_res = g.dt() - (g * h).scale(eps).truncate(N - 1)
        assert g_res.is_zero()


def test_riccati_pde_with_symbolic_argument():
    # f_t = g e^{h x} satisfies df/dt = x f + hbar^2 D (f' + x f'') with a
    # symbolic one-variable x
    for (a, b, c) in ((gr(0), gr(0), gr(1)), (gr(1), gr(2), gr(-1))):
        d = c * c - a * b
        eps = ParamScalar.param("hbar", 2, d) if d else PS_ZERO
        g, h = riccati_1d(a, b, c, N)
        x = MultiPoly.variable(1, 0)
        xs = TruncSeries.from_poly(x, N)
        f = (h.lift(1) * xs).exp() * g.lift(1)
        dx = lambda s: TruncSeries(1, s.order, [c_.derivative(0) for c_ in s.coeffs])
        rhs = (xs * f) + (dx(f) + xs * dx(dx(f))).scale(eps)
        assert f.dt() == rhs.truncate(N - 1)


def test_riccati_vs_moyal_examples():
    assert riccati_vs_moyal(gr(0), gr(0), gr(0), N).passed
    assert riccati_vs_moyal(gr(0), gr(0), gr(1), N).passed
    # D = -1: only hbar^2 D enters, no imaginary radicals appear
    rep = riccati_vs_moyal(gr(1), gr(1), gr(0), N)
    assert rep.passed
    g, _ = riccati_1d(gr(1), gr(1), gr(0), N)
    for coef in (c.constant_coefficient() for c in g.coeffs):
        for value in coef.terms.values():
            assert value.is_real


def test_first_divergence_reporting():
    s1 = TruncSeries.one(0, 4)
    s2 = TruncSeries.one(0, 4) + TruncSeries.t_term(MultiPoly.one(0), 3, 4)
    assert first_divergence(s1, s1) is None
    assert first_divergence(s1, s2) == 3


def test_matrix_json_roundtrip():
    m = SqMatrix(((gr(1, 2), gr(-3)), (gr(0), GR_ONE)))
    assert SqMatrix.from_json(m.to_json()) == m
