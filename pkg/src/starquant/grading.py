"""Grading and validation layer.

Polynomials decompose into homogeneous components tagged with the attached
mu exponent; the degree-m component models the space of global sections of
the m-th twisting sheaf on projective space, whose dimension is the plain
binomial count ``h0_dim``.  The two validators sweep monomials to test the
hypotheses under which the star product is associative and graded: the
iterated-versus-contracted identity for the structure matrix, and the
Jacobi rule for the induced bracket.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

from .errors import PreconditionError
from .poly import MultiPoly, grlex_key
from .reports import CheckReport
from .scalars import (
    PARAM_INDEX,
    PS_ONE,
    GaussianRational,
    ParamScalar,
    rat,
)
from .star import StarContext, star

_MU = PARAM_INDEX["mu"]


class GradedElement:
    """A finite sum of homogeneous components indexed by (degree, mu weight).

    Each component polynomial is homogeneous of its key degree and its
    coefficients carry no mu exponent (the weight is the key); reassembling
    multiplies each component by mu**weight and sums.
    """

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: dict):
        clean = {}
        for (deg, weight), poly in components.items():
            if poly.is_zero():
                continue
            if poly.n != n:
                raise ValueError("component variable count mismatch")
            degs = {sum(e) for e in poly.terms}
            if degs != {deg}:
                raise ValueError(f"component at degree {deg} is not homogeneous")
            for coef in poly.terms.values():
                if any(e[_MU] != 0 for e in coef.terms):
                    raise ValueError("component coefficients must be mu-free")
            clean[(deg, weight)] = poly
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "components", clean)

    def __setattr__(self, name, value):
        raise AttributeError("GradedElement is immutable")

    def is_zero(self) -> bool:
        return not self.components

    def degrees(self) -> list:
        return sorted({d for d, _ in self.components})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def reassemble(self) -> MultiPoly:
        total = MultiPoly.zero(self.n)
        for (deg, weight), poly in self.components.items():
            total = total + poly.scale(ParamScalar.param("mu", weight))
        return total

    def to_json(self) -> dict:
        comps = []
        for (deg, weight) in sorted(self.components):
            comps.append(
                {
                    "degree": deg,
                    "mu": weight,
                    "poly": self.components[(deg, weight)].to_json(),
                }
            )
        return {"components": comps}

    @classmethod
    def from_json(cls, n: int, data: dict) -> "GradedElement":
        comps = {}
        for entry in data["components"]:
            key = (int(entry["degree"]), int(entry["mu"]))
            poly = MultiPoly.from_json(n, entry["poly"])
            prev = comps.get(key)
            comps[key] = poly if prev is None else prev + poly
        return cls(n, comps)

    def __repr__(self) -> str:
        body = ", ".join(
            f"(deg {d}, mu^{w}): {p.text()}"
            for (d, w), p in sorted(self.components.items())
        )
        return f"GradedElement({{{body}}})"


def decompose(f: MultiPoly) -> GradedElement:
    """Split by total degree and mu exponent; reassembly returns f exactly."""
    buckets: dict = {}
    for exps, coef in f.terms.items():
        deg = sum(exps)
        for pexp, value in coef.terms.items():
            weight = pexp[_MU]
            stripped = (0,) + pexp[1:]
            key = (deg, weight)
            piece = MultiPoly.monomial(
                f.n, exps, ParamScalar({stripped: value})
            )
            prev = buckets.get(key)
            buckets[key] = piece if prev is None else prev + piece
    return GradedElement(f.n, buckets)


def h0_dim(n: int, m: int) -> int:
    """Dimension of the degree-m homogeneous polynomials in n+1 variables
    (0 when m < 0)."""
    if n < 1:
        raise ValueError("projective dimension must be >= 1")
    if m < 0:
        return 0
    return comb(n + m, n)


def specialize_mu(f: MultiPoly, value: GaussianRational) -> MultiPoly:
    """Substitute mu -> value (a nonzero scalar), collapsing mu exponents."""
    if not value:
        raise PreconditionError("mu is invertible; cannot specialize to zero")
    out = MultiPoly.zero(f.n)
    for exps, coef in f.terms.items():
        out = out + MultiPoly.monomial(f.n, exps, coef.substitute_mu(value))
    return out


def star_graded(ctx: StarContext, f: GradedElement, g: GradedElement) -> GradedElement:
    """Star product computed per component pair and redecomposed.

    Only established for a constant structure matrix; contraction order k
    sends degrees (p, q) to p + q - 2k and raises the mu weight by k when
    the coupling is mu/2.
    """
    if not ctx.constant_lambda:
        raise PreconditionError("graded star product requires constant lambda")
    if f.n != ctx.n or g.n != ctx.n:
        raise ValueError("variable count mismatch with context")
    total = MultiPoly.zero(ctx.n)
    for (d1, w1), p1 in f.components.items():
        lhs = p1.scale(ParamScalar.param("mu", w1))
        for (d2, w2), p2 in g.components.items():
            rhs = p2.scale(ParamScalar.param("mu", w2))
            total = total + star(ctx, lhs, rhs)
    return decompose(total)


# --- validators -------------------------------------------------------------


def _exps_of_degree(d: int, k: int):
    if k == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _exps_of_degree(d - first, k - 1):
            yield (first,) + rest


def monomials_upto(n: int, d_max: int) -> list:
    """All monomials of total degree <= d_max, in grlex order."""
    all_exps = []
    for d in range(d_max + 1):
        all_exps.extend(_exps_of_degree(d, n))
    all_exps.sort(key=grlex_key)
    return [MultiPoly.monomial(n, e) for e in all_exps]


def poisson_bracket(ctx: StarContext, f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """{f, g} = sum_ab lambda^ab d_a f d_b g."""
    acc = MultiPoly.zero(ctx.n)
    for a in range(ctx.n):
        df = f.derivative(a)
        if df.is_zero():
            continue
        for b in range(ctx.n):
            entry = ctx.lam[a][b]
            if entry.is_zero():
                continue
            dg = g.derivative(b)
            if dg.is_zero():
                continue
            acc = acc + entry * df * dg
    return acc


def check_jacobi(ctx: StarContext, d_max: int = 4) -> CheckReport:
    """Verify the cyclic Jacobi sum of the bracket on all monomial triples
    of degree <= d_max; reports the lexicographically first witness.

    The Jacobi sum is antisymmetric under swapping two arguments (the
    bracket is antisymmetric), so sweeping unordered triples is exhaustive.
    """
    monos = monomials_upto(ctx.n, d_max)
    for f, g, h in combinations_with_replacement(monos, 3):
        jac = (
            poisson_bracket(ctx, f, poisson_bracket(ctx, g, h))
            + poisson_bracket(ctx, g, poisson_bracket(ctx, h, f))
            + poisson_bracket(ctx, h, poisson_bracket(ctx, f, g))
        )
        if not jac.is_zero():
            return CheckReport(
                passed=False,
                witness={"f": f.text(), "g": g.text(), "h": h.text()},
                detail="cyclic Jacobi sum is nonzero",
            )
    return CheckReport(passed=True)


def _iterated_step(n: int, lam_right: list, state: dict) -> dict:
    """One application of the composed one-step operator on doubled
    variables: differentiate the left and right slots, then multiply by the
    matrix entry, which lives in the right-slot variables and is therefore
    hit by later right-slot derivatives."""
    new: dict = {}
    for exps, coef in state.items():
        for a, b, entry_terms in lam_right:
            ea = exps[a]
            if not ea:
                continue
            eb = exps[n + b]
            if not eb:
                continue
            base = list(exps)
            base[a] = ea - 1
            base[n + b] = eb - 1
            dcoef = coef.scale_rat(ea * eb)
            for wexp, wc in entry_terms:
                key = tuple(x + y for x, y in zip(base, wexp))
                contrib = dcoef * wc
                prev = new.get(key)
                if prev is None:
                    if contrib:
                        new[key] = contrib
                else:
                    tot = prev + contrib
                    if tot:
                        new[key] = tot
                    else:
                        del new[key]
    return new


def check_lambda_relation(
    ctx: StarContext, k_max: int = 4, d_max: int = 4
) -> CheckReport:
    """Compare the iterated one-step biderivation with the fully contracted
    operator, order by order, on every pair of monomials of degree <= d_max.

    For a constant structure matrix the two coincide at every order; a
    non-constant matrix generically fails at order 2 because the iterated
    form differentiates the matrix entries accumulated by earlier steps.
    Reports the smallest failing order with the lexicographically first
    witness pair.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2 (order 1 can never diverge)")
    n = ctx.n
    # iterated form: matrix entries live in the right-slot variables
    zn = (0,) * n
    lam_right = []
    for a in range(n):
        for b in range(n):
            p = ctx.lam[a][b]
            if p.is_zero():
                continue
            lam_right.append((a, b, [(zn + e, c) for e, c in p.terms.items()]))
    monos = monomials_upto(n, d_max)
    # contracted form via the star engine with coupling 1: term k of the
    # expansion equals (contracted operator at order k) / k!
    from .star import star_terms

    one_ctx = StarContext(n, ctx.lam, PS_ONE)
    contracted = {}
    iterated = {}
    for fi, f in enumerate(monos):
        for gi, g in enumerate(monos):
            contracted[(fi, gi)] = star_terms(one_ctx, f, g)
            states = []
            state = {}
            for ef, cf in f.terms.items():
                for eg, cg in g.terms.items():
                    state[ef + eg] = cf * cg
            for _ in range(k_max):
                state = _iterated_step(n, lam_right, state)
                if not state:
                    break
                states.append(dict(state))
            iterated[(fi, gi)] = states
    fact = 1
    for k in range(1, k_max + 1):
        fact *= k
        for fi, f in enumerate(monos):
            for gi, g in enumerate(monos):
                states = iterated[(fi, gi)]
                lhs_acc: dict = {}
                if k <= len(states):
                    for exps, coef in states[k - 1].items():
                        key = tuple(exps[i] + exps[n + i] for i in range(n))
                        prev = lhs_acc.get(key)
                        if prev is None:
                            lhs_acc[key] = coef
                        else:
                            tot = prev + coef
                            if tot:
                                lhs_acc[key] = tot
                            else:
                                del lhs_acc[key]
                lhs = MultiPoly(n, lhs_acc)
                terms = contracted[(fi, gi)]
                rhs = (
                    terms[k].scale_rat(rat(fact))
                    if k < len(terms)
                    else MultiPoly.zero(n)
                )
                if lhs != rhs:
                    return CheckReport(
                        passed=False,
                        first_divergence_order=k,
                        witness={"k": k, "f": f.text(), "g": g.text()},
                        detail="iterated and contracted forms differ",
                    )
    return CheckReport(passed=True)
