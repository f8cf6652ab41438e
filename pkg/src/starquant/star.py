"""Star products on polynomial algebras.

The product implemented here is the fully contracted expansion

    f (*) g  =  sum_k  coupling^k / k! *
                L^{a1 b1} ... L^{ak bk} * d_{a1..ak} f * d_{b1..bk} g

for an antisymmetric structure matrix L and a scalar coupling (mu/2 for the
graded product on homogeneous coordinates, i*hbar/2 for the Weyl-algebra
product; one engine serves both).  On top of it sit the K-ordered products
for symmetric ordering matrices, the ordering intertwiner, products with
linear exponentials, and the term-by-term ODE recursion for star
exponentials which acts as the independent oracle for every closed form in
:mod:`starquant.matrices`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import PreconditionError
from .poly import MultiPoly
from .scalars import (
    GR_ONE,
    I_HBAR_HALF,
    GaussianRational,
    ParamScalar,
    gr,
    rat,
)
from .series import TruncSeries

# scalar i*hbar/4, the exponent coupling of the ordering intertwiner
I_HBAR_QUARTER = ParamScalar.param("hbar", 1, GaussianRational(0, rat(1, 4)))


def standard_j(m: int) -> tuple:
    """The 2m x 2m block matrix [[0, -I], [I, 0]] over GaussianRational."""
    n = 2 * m
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < m and j == m + i:
                row.append(-GR_ONE)
            elif i >= m and j == i - m:
                row.append(GR_ONE)
            else:
                row.append(gr(0))
        rows.append(tuple(row))
    return tuple(rows)


class OrderingK:
    """A constant symmetric ordering matrix over GaussianRational."""

    __slots__ = ("n", "entries")

    def __init__(self, entries: Sequence[Sequence[GaussianRational]]):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("ordering matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise PreconditionError("ordering matrix must be symmetric")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("OrderingK is immutable")

    @classmethod
    def weyl(cls, n: int) -> "OrderingK":
        zero = gr(0)
        return cls(tuple((zero,) * n for _ in range(n)))

    @classmethod
    def normal(cls, m: int) -> "OrderingK":
        """K0 = [[0, I], [I, 0]] on 2m variables (normal ordering)."""
        n = 2 * m
        rows = []
        for i in range(n):
            row = [gr(0)] * n
            if i < m:
                row[m + i] = GR_ONE
            else:
                row[i - m] = GR_ONE
            rows.append(tuple(row))
        return cls(rows)

    @classmethod
    def antinormal(cls, m: int) -> "OrderingK":
        """-K0 (anti-normal ordering)."""
        k0 = cls.normal(m)
        return cls(tuple(tuple(-v for v in row) for row in k0.entries))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrderingK):
            return NotImplemented
        return self.entries == other.entries

    def to_json(self) -> list:
        return [[v.text() for v in row] for row in self.entries]

    @classmethod
    def from_json(cls, data) -> "OrderingK":
        return cls(
            tuple(
                tuple(GaussianRational.parse(v) for v in row) for row in data
            )
        )


class StarContext:
    """The quantization datum: variable count, structure matrix, coupling.

    ``lam`` is an n x n antisymmetric matrix of polynomials; ``coupling`` is
    the nonzero scalar multiplying each contraction step.
    ``constant_lambda`` records whether every entry has degree <= 0, which
    enables the fast contraction path and the ordering operations.
    """

    __slots__ = ("n", "lam", "coupling", "constant_lambda")

    def __init__(self, n: int, lam, coupling: ParamScalar):
        rows = tuple(tuple(row) for row in lam)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("lambda must be an n x n matrix")
        for row in rows:
            for p in row:
                if not isinstance(p, MultiPoly) or p.n != n:
                    raise ValueError("lambda entries must be MultiPoly in n variables")
        for i in range(n):
            for j in range(n):
                if rows[i][j] != -rows[j][i]:
                    raise PreconditionError(
                        "lambda must be antisymmetric as a matrix of polynomials"
                    )
        if not coupling:
            raise PreconditionError("coupling must be nonzero")
        constant = all(p.degree() <= 0 for row in rows for p in row)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lam", rows)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "constant_lambda", constant)

    def __setattr__(self, name, value):
        raise AttributeError("StarContext is immutable")

    @classmethod
    def constant(cls, entries, coupling: ParamScalar) -> "StarContext":
        """Context from a constant matrix (GaussianRational or ParamScalar entries)."""
        n = len(entries)
        rows = []
        for row in entries:
            prow = []
            for v in row:
                if isinstance(v, GaussianRational):
                    v = ParamScalar.from_gaussian(v)
                prow.append(MultiPoly.const(n, v))
            rows.append(tuple(prow))
        return cls(n, tuple(rows), coupling)

    @classmethod
    def weyl(cls, m: int, coupling: ParamScalar = I_HBAR_HALF) -> "StarContext":
        """The 2m-variable Weyl context: lambda = [[0,-I],[I,0]], coupling i*hbar/2."""
        return cls.constant(standard_j(m), coupling)

    def scalar_entries(self) -> tuple:
        """Constant lambda as a matrix of ParamScalar (requires constant_lambda)."""
        if not self.constant_lambda:
            raise PreconditionError("lambda is not constant")
        return tuple(
            tuple(p.constant_coefficient() for p in row) for row in self.lam
        )

    def to_json(self) -> dict:
        from .scalars import PARAM_NAMES

        return {
            "n": self.n,
            "lambda": [[p.to_json() for p in row] for row in self.lam],
            "coupling": self.coupling.to_json(),
            "params": list(PARAM_NAMES),
        }

    @classmethod
    def from_json(cls, data: dict) -> "StarContext":
        n = int(data["n"])
        lam = tuple(
            tuple(MultiPoly.from_json(n, p) for p in row)
            for row in data["lambda"]
        )
        coupling = ParamScalar.from_json(data["coupling"])
        return cls(n, lam, coupling)


# --- contraction engine ------------------------------------------------


def _diag2(n: int, state: dict) -> MultiPoly:
    acc: dict = {}
    for exps, coef in state.items():
        key = tuple(exps[i] + exps[n + i] for i in range(n))
        prev = acc.get(key)
        if prev is None:
            acc[key] = coef
        else:
            tot = prev + coef
            if tot:
                acc[key] = tot
            else:
                del acc[key]
    return MultiPoly._raw(n, acc)


def _terms_constant(n, pairs, coupling, f, g, cap) -> list:
    """Per-order contraction terms for a constant structure matrix.

    Works on the doubled variable set (x = left slot, y = right slot): one
    contraction step differentiates x_a and y_b and multiplies by the
    matrix entry; the factor coupling^k/k! is folded in as the iteration
    proceeds.  Entries of ``pairs`` are (a, b, scalar) with scalar nonzero.
    """
    state: dict = {}
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            prod = cf * cg
            if prod:
                state[ef + eg] = prod
    terms = [_diag2(n, state)]
    k = 0
    while state:
        k += 1
        if k > cap:
            raise PreconditionError(
                f"contraction did not terminate within {cap} steps"
            )
        new: dict = {}
        for exps, coef in state.items():
            for a, b, c in pairs:
                ea = exps[a]
                if not ea:
                    continue
                eb = exps[n + b]
                if not eb:
                    continue
                key = (
                    exps[:a]
                    + (ea - 1,)
                    + exps[a + 1 : n + b]
                    + (eb - 1,)
                    + exps[n + b + 1 :]
                )
                contrib = (coef * c).scale_rat(ea * eb)
                prev = new.get(key)
                if prev is None:
                    new[key] = contrib
                else:
                    tot = prev + contrib
                    if tot:
                        new[key] = tot
                    else:
                        del new[key]
        if not new:
            break
        # fold in coupling/k so that state always carries coupling^k/k!
        scale = coupling.scale_rat(rat(1, k))
        state = {e: c * scale for e, c in new.items()}
        terms.append(_diag2(n, state))
    return terms


def _terms_polynomial(n, lam, coupling, f, g, cap) -> list:
    """Per-order contraction terms for a polynomial structure matrix.

    Uses three variable groups (x for the left slot, y for the right slot,
    w for the matrix entries) so that the accumulated matrix factors are
    never differentiated: this is exactly the fully contracted expansion.
    """
    zeros2n = (0,) * (2 * n)
    entry_terms = []
    for a in range(n):
        for b in range(n):
            p = lam[a][b]
            if p.is_zero():
                continue
            entry_terms.append(
                (a, b, [(zeros2n + e, c) for e, c in p.terms.items()])
            )
    zn = (0,) * n
    state: dict = {}
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            prod = cf * cg
            if prod:
                state[ef + eg + zn] = prod

    def diag3(st: dict) -> MultiPoly:
        acc: dict = {}
        for exps, coef in st.items():
            key = tuple(
                exps[i] + exps[n + i] + exps[2 * n + i] for i in range(n)
            )
            prev = acc.get(key)
            if prev is None:
                acc[key] = coef
            else:
                tot = prev + coef
                if tot:
                    acc[key] = tot
                else:
                    del acc[key]
        return MultiPoly._raw(n, acc)

    terms = [diag3(state)]
    k = 0
    while state:
        k += 1
        if k > cap:
            raise PreconditionError(
                f"contraction did not terminate within {cap} steps"
            )
        new: dict = {}
        for exps, coef in state.items():
            for a, b, wterms in entry_terms:
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
                for wexp, wc in wterms:
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
        if not new:
            break
        scale = coupling.scale_rat(rat(1, k))
        state = {e: c * scale for e, c in new.items()}
        terms.append(diag3(state))
    return terms


def _contracted_terms(n, scalar_matrix, coupling, f, g) -> list:
    pairs = []
    for a in range(n):
        for b in range(n):
            c = scalar_matrix[a][b]
            if c:
                pairs.append((a, b, c))
    cap = max(f.degree(), 0) + max(g.degree(), 0) + 4
    return _terms_constant(n, pairs, coupling, f, g, cap)


def star_terms(ctx: StarContext, f: MultiPoly, g: MultiPoly) -> list:
    """The list of contraction-order terms of f (*) g (term k includes
    the factor coupling^k/k!); their sum is the star product."""
    if f.n != ctx.n or g.n != ctx.n:
        raise ValueError("variable count mismatch with context")
    cap = max(f.degree(), 0) + max(g.degree(), 0) + 4
    if ctx.constant_lambda:
        pairs = []
        scal = ctx.scalar_entries()
        for a in range(ctx.n):
            for b in range(ctx.n):
                if scal[a][b]:
                    pairs.append((a, b, scal[a][b]))
        return _terms_constant(ctx.n, pairs, ctx.coupling, f, g, cap)
    return _terms_polynomial(ctx.n, ctx.lam, ctx.coupling, f, g, cap)


def star(ctx: StarContext, f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """The star product of two polynomials."""
    terms = star_terms(ctx, f, g)
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def star_commutator(ctx: StarContext, f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return star(ctx, f, g) - star(ctx, g, f)


def star_k_ordered(
    ctx: StarContext, K: OrderingK, f: MultiPoly, g: MultiPoly
) -> MultiPoly:
    """The K-ordered product: the contracted expansion with matrix lam + K.

    Requires a constant structure matrix and a symmetric K of matching size.
    """
    if not ctx.constant_lambda:
        raise PreconditionError("K-ordered products require a constant lambda")
    if K.n != ctx.n:
        raise ValueError("ordering matrix size mismatch")
    if f.n != ctx.n or g.n != ctx.n:
        raise ValueError("variable count mismatch with context")
    scal = ctx.scalar_entries()
    mixed = tuple(
        tuple(
            scal[a][b] + ParamScalar.from_gaussian(K.entries[a][b])
            for b in range(ctx.n)
        )
        for a in range(ctx.n)
    )
    terms = _contracted_terms(ctx.n, mixed, ctx.coupling, f, g)
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def intertwine(
    K: OrderingK, f: MultiPoly, coupling: ParamScalar | None = None
) -> MultiPoly:
    """Apply the ordering intertwiner exp(coupling * sum_ij K_ij d_i d_j) to f.

    The sum is finite because each application of the second-order operator
    lowers the degree by 2.  The default coupling is i*hbar/4, the value
    under which the intertwiner converts between the plain product and the
    K-ordered product.
    """
    if coupling is None:
        coupling = I_HBAR_QUARTER
    if f.n != K.n:
        raise ValueError("variable count mismatch with ordering matrix")
    n = K.n
    pairs = [
        (i, j, K.entries[i][j])
        for i in range(n)
        for j in range(n)
        if K.entries[i][j]
    ]

    def second_order(p: MultiPoly) -> MultiPoly:
        acc: dict = {}
        for exps, coef in p.terms.items():
            for i, j, kij in pairs:
                ei = exps[i]
                if not ei:
                    continue
                lowered = list(exps)
                lowered[i] = ei - 1
                ej = lowered[j]
                if not ej:
                    continue
                lowered[j] = ej - 1
                key = tuple(lowered)
                contrib = coef.scale_gauss(kij.scale(rat(ei * ej)))
                prev = acc.get(key)
                if prev is None:
                    acc[key] = contrib
                else:
                    tot = prev + contrib
                    if tot:
                        acc[key] = tot
                    else:
                        del acc[key]
        return MultiPoly._raw(n, acc)

    result = f
    cur = f
    m = 0
    while cur:
        m += 1
        cur = second_order(cur).scale(coupling.scale_rat(rat(1, m)))
        result = result + cur
    return result


@dataclass(frozen=True)
class LinearExpFactor:
    """Symbolic prefactor exp(sign * s * <a, u> / (i*hbar)).

    Only the data (covector, scalar, sign) is carried; the exponential is
    never expanded into the polynomial algebra.
    """

    covector: tuple
    scale: ParamScalar
    sign: int

    def text(self) -> str:
        vec = ", ".join(v.text() for v in self.covector)
        sgn = "+" if self.sign >= 0 else "-"
        return f"exp({sgn}({self.scale.text()})*<({vec}), u>/(i*hbar))"


def exp_linear_product(
    ctx: StarContext,
    K: OrderingK,
    a: Sequence[GaussianRational],
    s: ParamScalar,
    f: MultiPoly,
    side: str,
) -> tuple:
    """Product of a linear exponential with f under the K-ordered product.

    ``side`` is "left" for exp(s<a,u>/ih) (*) f, which shifts the argument
    of f by (s/2) a (K + J); "right" for f (*) exp(-s<a,u>/ih), which
    shifts by (s/2) a (-K + J).  Returns (prefactor descriptor, shifted f).
    """
    if not ctx.constant_lambda:
        raise PreconditionError("linear-exponential products require constant lambda")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if len(a) != ctx.n or K.n != ctx.n or f.n != ctx.n:
        raise ValueError("dimension mismatch")
    jmat = ctx.scalar_entries()
    sign = 1 if side == "left" else -1
    half_s = s.scale_rat(rat(1, 2))
    offsets = []
    for b in range(ctx.n):
        acc = ParamScalar.from_gaussian(gr(0))
        for al in range(ctx.n):
            if not a[al]:
                continue
            m_ab = jmat[al][b] + ParamScalar.from_gaussian(
                K.entries[al][b].scale(rat(sign))
            )
            acc = acc + m_ab.scale_gauss(a[al])
        offsets.append(acc * half_s)
    shifted = f.shift(offsets)
    prefactor = LinearExpFactor(tuple(a), s, sign)
    return prefactor, shifted


def ode_star_exponential(ctx: StarContext, H: MultiPoly, N: int) -> TruncSeries:
    """Term-by-term star-exponential series: F0 = 1, F_{k+1} = H (*) F_k / (k+1).

    This recursion is the independent oracle against which all closed-form
    expressions are checked.
    """
    if H.n != ctx.n:
        raise ValueError("variable count mismatch with context")
    coeffs = [MultiPoly.one(ctx.n)]
    for k in range(N):
        coeffs.append(star(ctx, H, coeffs[-1]).scale_rat(rat(1, k + 1)))
    return TruncSeries(ctx.n, N, coeffs)
