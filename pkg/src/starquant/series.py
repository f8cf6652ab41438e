"""Truncated power series in the evolution variable t.

A ``TruncSeries`` of order N holds coefficients c_0..c_N (each a MultiPoly in
a fixed number of variables); arithmetic is exact modulo t^(N+1).  Binary
operations require both operands to carry the same order and variable count;
re-truncation is always explicit via :meth:`truncate`.
"""

from __future__ import annotations

from .errors import PreconditionError
from .poly import MultiPoly
from .scalars import PS_ONE, ParamScalar, rat


class TruncSeries:
    __slots__ = ("n", "order", "coeffs")

    def __init__(self, n: int, order: int, coeffs):
        coeffs = tuple(coeffs)
        if order < 0:
            raise ValueError("order must be >= 0")
        if len(coeffs) != order + 1:
            raise ValueError(f"need {order + 1} coefficients, got {len(coeffs)}")
        for c in coeffs:
            if not isinstance(c, MultiPoly) or c.n != n:
                raise ValueError("coefficients must be MultiPoly in n variables")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("TruncSeries is immutable")

    @staticmethod
    def _raw(n: int, order: int, coeffs: tuple) -> "TruncSeries":
        s = TruncSeries.__new__(TruncSeries)
        object.__setattr__(s, "n", n)
        object.__setattr__(s, "order", order)
        object.__setattr__(s, "coeffs", coeffs)
        return s

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int, order: int) -> "TruncSeries":
        z = MultiPoly.zero(n)
        return cls._raw(n, order, (z,) * (order + 1))

    @classmethod
    def one(cls, n: int, order: int) -> "TruncSeries":
        return cls.from_poly(MultiPoly.one(n), order)

    @classmethod
    def from_poly(cls, p: MultiPoly, order: int) -> "TruncSeries":
        """The constant-in-t series with value p."""
        z = MultiPoly.zero(p.n)
        return cls._raw(p.n, order, (p,) + (z,) * order)

    @classmethod
    def t_term(cls, p: MultiPoly, k: int, order: int) -> "TruncSeries":
        """The series p * t^k (zero if k exceeds the order)."""
        z = MultiPoly.zero(p.n)
        coeffs = [z] * (order + 1)
        if k <= order:
            coeffs[k] = p
        return cls._raw(p.n, order, tuple(coeffs))

    # -- structure ------------------------------------------------------

    def _check_compat(self, other: "TruncSeries") -> None:
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")
        if self.order != other.order:
            raise ValueError(
                f"truncation order mismatch: {self.order} vs {other.order}; "
                "re-truncate explicitly"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.n == other.n
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.n, self.order, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        """Explicitly drop (or zero-pad) to the given order."""
        if order <= self.order:
            return TruncSeries._raw(self.n, order, self.coeffs[: order + 1])
        z = MultiPoly.zero(self.n)
        return TruncSeries._raw(
            self.n, order, self.coeffs + (z,) * (order - self.order)
        )

    def lift(self, n: int) -> "TruncSeries":
        """Re-embed a scalar (0-variable) series into n variables."""
        if self.n == n:
            return self
        if self.n != 0:
            raise ValueError("lift is only defined from 0 variables")
        zeros = (0,) * n
        coeffs = tuple(
            MultiPoly(n, {zeros: c.constant_coefficient()}) for c in self.coeffs
        )
        return TruncSeries._raw(n, self.order, coeffs)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_compat(other)
        return TruncSeries._raw(
            self.n,
            self.order,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self) -> "TruncSeries":
        return TruncSeries._raw(self.n, self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_compat(other)
        return TruncSeries._raw(
            self.n,
            self.order,
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_compat(other)
        N = self.order
        za = self.coeffs
        zb = other.coeffs
        out = []
        for k in range(N + 1):
            acc = MultiPoly.zero(self.n)
            for i in range(k + 1):
                if za[i].is_zero() or zb[k - i].is_zero():
                    continue
                acc = acc + za[i] * zb[k - i]
            out.append(acc)
        return TruncSeries._raw(self.n, N, tuple(out))

    def scale(self, coef: ParamScalar) -> "TruncSeries":
        return TruncSeries._raw(
            self.n, self.order, tuple(c.scale(coef) for c in self.coeffs)
        )

    def scale_rat(self, r) -> "TruncSeries":
        return TruncSeries._raw(
            self.n, self.order, tuple(c.scale_rat(r) for c in self.coeffs)
        )

    def dt(self) -> "TruncSeries":
        """Derivative d/dt; the result is only known through order N-1."""
        if self.order == 0:
            raise PreconditionError("cannot differentiate an order-0 series")
        coeffs = tuple(
            self.coeffs[k + 1].scale_rat(k + 1) for k in range(self.order)
        )
        return TruncSeries._raw(self.n, self.order - 1, coeffs)

    # -- the three series solvers ----------------------------------------

    def _leading_unit(self) -> ParamScalar:
        c0 = self.coeffs[0]
        if not c0.is_constant():
            raise PreconditionError(
                "t^0 coefficient must be a degree-0 monomial to invert"
            )
        return c0.constant_coefficient()

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse modulo t^(N+1).

        Requires the t^0 coefficient to be an invertible scalar (nonzero,
        no non-invertible formal parameters).
        """
        lead = self._leading_unit()
        inv0 = lead.inverse()  # raises for zero / non-invertible scalars
        n, N = self.n, self.order
        out = [MultiPoly.const(n, inv0)]
        for k in range(1, N + 1):
            acc = MultiPoly.zero(n)
            for j in range(1, k + 1):
                if self.coeffs[j].is_zero():
                    continue
                acc = acc + self.coeffs[j] * out[k - j]
            out.append((-acc).scale(inv0))
        return TruncSeries._raw(n, N, tuple(out))

    def inv_sqrt(self) -> "TruncSeries":
        """The series r with r^2 * self = 1 and r(0) = 1.

        The t^0 coefficient of the input must equal the scalar 1; normalize
        externally if it does not.
        """
        if self._leading_unit() != PS_ONE:
            raise PreconditionError("inv_sqrt requires leading coefficient 1")
        n, N = self.n, self.order
        out = [MultiPoly.one(n)]
        half = rat(1, 2)
        for k in range(1, N + 1):
            # coefficient of t^k in r*r*s must vanish; solve for out[k]
            acc = MultiPoly.zero(n)
            for i in range(k + 1):
                for j in range(k - i + 1):
                    if i == k or j == k:
                        continue  # skips the 2*out[k]*s0 unknown
                    l = k - i - j
                    if self.coeffs[l].is_zero():
                        continue
                    acc = acc + out[i] * out[j] * self.coeffs[l]
            out.append((-acc).scale_rat(half))
        return TruncSeries._raw(n, N, tuple(out))

    def exp(self) -> "TruncSeries":
        """Series exponential sum_k self^k / k!; requires zero constant term."""
        if not self.coeffs[0].is_zero():
            raise PreconditionError("exp requires a zero t^0 coefficient")
        n, N = self.n, self.order
        result = TruncSeries.one(n, N)
        power = TruncSeries.one(n, N)
        fact = rat(1)
        for k in range(1, N + 1):
            power = power * self
            if power.is_zero():
                break
            fact = fact * k
            result = result + power.scale_rat(1 / fact)
        return result

    def __repr__(self) -> str:
        body = " + ".join(
            f"({c.text()})*t^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero()
        )
        return f"TruncSeries(N={self.order}, {body or '0'})"
