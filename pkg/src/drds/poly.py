"""Exact multivariate polynomial and rational-function arithmetic.

Coefficients are arbitrary-precision rationals (fractions.Fraction); a
Polynomial is a sparse map from exponent vectors to coefficients over an
ordered variable context, and a RationalFunction is a num/den pair that
is sign- and content-normalized but deliberately *not* reduced by a
multivariate gcd: equality testing, positivity work and period checks
all operate on cross-multiplied polynomials, so full cancellation buys
nothing and costs a lot.

Term order is graded lexicographic on the ordered context (earlier
variables rank higher), which fixes serialization and printing.

Evaluation supports three arithmetic modes: exact (Fraction), float64,
and outward-rounded intervals (see interval.Interval).  All values are
immutable after construction; operations never mutate their inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import DivisionByZero, ZeroDenominator
from .interval import Interval

Scalar = Union[int, Fraction]


def grlex_key(mono: tuple) -> tuple:
    """Sort key: graded lexicographic, ascending."""
    return (sum(mono), mono)


def monomials_up_to_degree(nvars: int, degree: int) -> list:
    """All exponent vectors with total degree <= degree, graded-lex descending."""
    result = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            result.append(tuple(prefix))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], remaining - e, slots - 1)

    rec([], degree, nvars)
    result.sort(key=grlex_key, reverse=True)
    return result


class Polynomial:
    """Sparse exact polynomial over an ordered variable context."""

    __slots__ = ("context", "terms")

    def __init__(self, context: Sequence[str], terms: Mapping[tuple, Scalar] | None = None):
        self.context = tuple(context)
        clean = {}
        if terms:
            n = len(self.context)
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c == 0:
                    continue
                mono = tuple(mono)
                if len(mono) != n:
                    raise ValueError(f"monomial {mono} does not match context {self.context}")
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self.terms = {m: c for m, c in clean.items() if c != 0}

    # --- constructors -----------------------------------------------------

    @staticmethod
    def zero(context) -> "Polynomial":
        return Polynomial(context, {})

    @staticmethod
    def constant(context, value) -> "Polynomial":
        n = len(tuple(context))
        return Polynomial(context, {(0,) * n: Fraction(value)})

    @staticmethod
    def variable(context, name: str) -> "Polynomial":
        context = tuple(context)
        i = context.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(context)))
        return Polynomial(context, {mono: Fraction(1)})

    # --- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.context.index(var)
        return max((m[i] for m in self.terms), default=0)

    def per_variable_degrees(self) -> tuple:
        n = len(self.context)
        degs = [0] * n
        for m in self.terms:
            for i in range(n):
                if m[i] > degs[i]:
                    degs[i] = m[i]
        return tuple(degs)

    def sorted_terms(self) -> list:
        """(monomial, coefficient) pairs in graded-lex descending order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def coefficient(self, mono: tuple) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.context == other.context
            and self.terms == other.terms
        )

    def __repr__(self):
        from .parsing import format_polynomial

        return f"Polynomial({format_polynomial(self)!r})"

    # --- ring operations ----------------------------------------------------

    def _check_context(self, other: "Polynomial"):
        if self.context != other.context:
            raise ValueError(f"context mismatch: {self.context} vs {other.context}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.context, other)
        self._check_context(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, Fraction(0)) + c
            if s == 0:
                terms.pop(m, None)
            else:
                terms[m] = s
        return Polynomial(self.context, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.context, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.context, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Polynomial.zero(self.context)
            return Polynomial(self.context, {m: cc * c for m, cc in self.terms.items()})
        self._check_context(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial(self.context, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers require non-negative integer exponents")
        result = Polynomial.constant(self.context, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, factor) -> "Polynomial":
        return self * Fraction(factor)

    # --- calculus -----------------------------------------------------------

    def differentiate(self, var: str) -> "Polynomial":
        i = self.context.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            dm = m[:i] + (e - 1,) + m[i + 1:]
            out[dm] = out.get(dm, Fraction(0)) + c * e
        return Polynomial(self.context, out)

    # --- context surgery ------------------------------------------------------

    def remap(self, new_context: Sequence[str], rename: Mapping[str, str] | None = None) -> "Polynomial":
        """Reinterpret over new_context; rename maps old names to new ones."""
        rename = rename or {}
        new_context = tuple(new_context)
        positions = []
        for old in self.context:
            name = rename.get(old, old)
            if name not in new_context:
                raise ValueError(f"variable {name} missing from target context")
            positions.append(new_context.index(name))
        n = len(new_context)
        out = {}
        for m, c in self.terms.items():
            mono = [0] * n
            for e, pos in zip(m, positions):
                mono[pos] += e
            key = tuple(mono)
            out[key] = out.get(key, Fraction(0)) + c
        return Polynomial(new_context, out)

    def substitute_values(self, values: Mapping[str, Scalar]) -> "Polynomial":
        """Plug exact rationals in for a subset of variables; context shrinks."""
        keep = [v for v in self.context if v not in values]
        idx_keep = [self.context.index(v) for v in keep]
        idx_sub = [(i, Fraction(values[v])) for i, v in enumerate(self.context) if v in values]
        out = {}
        for m, c in self.terms.items():
            factor = c
            for i, val in idx_sub:
                factor *= val ** m[i]
            if factor == 0:
                continue
            key = tuple(m[i] for i in idx_keep)
            s = out.get(key, Fraction(0)) + factor
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return Polynomial(keep, out)

    # --- evaluation -----------------------------------------------------------

    def evaluate_exact(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != len(self.context):
            raise ValueError("point length does not match context size")
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        if len(point) != len(self.context):
            raise ValueError("point length does not match context size")
        total = 0.0
        for m, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def evaluate_interval(self, point: Sequence[Interval]) -> Interval:
        if len(point) != len(self.context):
            raise ValueError("point length does not match context size")
        boxed = [x if isinstance(x, Interval) else Interval._coerce(x) for x in point]
        total = Interval(0.0)
        for m, c in self.terms.items():
            v = Interval.from_fraction(c)
            for x, e in zip(boxed, m):
                if e:
                    v = v * (x ** e)
            total = total + v
        return total

    def float_evaluator(self):
        """Compiled float evaluator (list of (coeff, nonzero-exponent pairs))."""
        compiled = [
            (float(c), tuple((i, e) for i, e in enumerate(m) if e))
            for m, c in self.sorted_terms()
        ]

        def ev(point):
            total = 0.0
            for c, powers in compiled:
                v = c
                for i, e in powers:
                    v *= point[i] ** e
                total += v
            return total

        return ev

    # --- composition backend ----------------------------------------------------

    def compose_cleared(
        self,
        numerators: Sequence["Polynomial"],
        denominators: Sequence["Polynomial"],
        clearing_degrees: Sequence[int],
    ) -> "Polynomial":
        """Numerator of self(n_1/d_1, ..., n_k/d_k) cleared by prod d_i^D_i.

        D_i must be >= the degree of self in variable i; all n_i/d_i share
        one target context.
        """
        if not numerators:
            return self if not self.context else self.remap(())
        target = numerators[0].context
        npow = []
        dpow = []
        for i, (n_i, d_i) in enumerate(zip(numerators, denominators)):
            pn = [Polynomial.constant(target, 1)]
            pd = [Polynomial.constant(target, 1)]
            for _ in range(clearing_degrees[i]):
                pn.append(pn[-1] * n_i)
                pd.append(pd[-1] * d_i)
            npow.append(pn)
            dpow.append(pd)
        total = Polynomial.zero(target)
        for m, c in self.terms.items():
            piece = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    piece = piece * npow[i][e]
                drop = clearing_degrees[i] - e
                if drop:
                    piece = piece * dpow[i][drop]
            total = total + piece
        return total


def _pair_content(polys: Iterable[Polynomial]) -> Fraction:
    """gcd of all coefficients across the given polynomials (0 if all zero)."""
    num_gcd = 0
    den_lcm = 1
    for p in polys:
        for c in p.terms.values():
            num_gcd = math.gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    if num_gcd == 0:
        return Fraction(0)
    return Fraction(num_gcd, den_lcm)


class RationalFunction:
    """Normalized exact rational function num/den over a shared context.

    Normalization removes the rational content common to the pair and makes
    the graded-lex leading coefficient of the denominator positive.  No
    multivariate gcd cancellation is attempted.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial, _normalized=False):
        if num.context != den.context:
            raise ValueError("numerator and denominator contexts differ")
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        if not _normalized:
            content = _pair_content([num, den])
            if content == 0:
                content = Fraction(1)
            if den.leading_coefficient() < 0:
                content = -content
            if content != 1:
                inv = 1 / content
                num = num.scale(inv)
                den = den.scale(inv)
        self.num = num
        self.den = den

    # --- constructors ---------------------------------------------------------

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p, Polynomial.constant(p.context, 1))

    @staticmethod
    def constant(context, value) -> "RationalFunction":
        return RationalFunction.from_polynomial(Polynomial.constant(context, value))

    @staticmethod
    def variable(context, name) -> "RationalFunction":
        return RationalFunction.from_polynomial(Polynomial.variable(context, name))

    @property
    def context(self):
        return self.num.context

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __repr__(self):
        from .parsing import format_rational

        return f"RationalFunction({format_rational(self)!r})"

    # --- equality ----------------------------------------------------------------

    def equal(self, other: "RationalFunction") -> bool:
        """Cross-multiplication equality: num_a*den_b - num_b*den_a == 0."""
        if self.context != other.context:
            raise ValueError("context mismatch in rational equality test")
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other):
        return isinstance(other, RationalFunction) and self.equal(other)

    # --- field operations -----------------------------------------------------------

    @staticmethod
    def _coerce(value, context) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return RationalFunction.from_polynomial(value)
        return RationalFunction.constant(context, value)

    def __add__(self, other):
        o = RationalFunction._coerce(other, self.context)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        o = RationalFunction._coerce(other, self.context)
        return RationalFunction(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = RationalFunction._coerce(other, self.context)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunction._coerce(other, self.context)
        if o.num.is_zero():
            raise ZeroDenominator("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunction._coerce(other, self.context) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("rational-function powers must be integers")
        if n < 0:
            return RationalFunction(self.den, self.num) ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    # --- calculus -----------------------------------------------------------------

    def differentiate(self, var: str) -> "RationalFunction":
        """Quotient-rule derivative, normalized."""
        dn = self.num.differentiate(var)
        dd = self.den.differentiate(var)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    # --- composition -----------------------------------------------------------------

    def compose(self, subs: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Exact substitution of a rational function for every variable."""
        for v in self.context:
            if v not in subs:
                raise ValueError(f"no substitution supplied for variable {v}")
        reps = [subs[v] for v in self.context]
        if reps:
            target = reps[0].context
            for r in reps:
                if r.context != target:
                    raise ValueError("substitution values must share one context")
        nd = self.num.per_variable_degrees()
        dd = self.den.per_variable_degrees()
        clearing = tuple(max(a, b) for a, b in zip(nd, dd)) if nd else ()
        nums = [r.num for r in reps]
        dens = [r.den for r in reps]
        new_num = self.num.compose_cleared(nums, dens, clearing)
        new_den = self.den.compose_cleared(nums, dens, clearing)
        if new_den.is_zero():
            raise ZeroDenominator("substituted denominator is identically zero")
        return RationalFunction(new_num, new_den)

    # --- evaluation ---------------------------------------------------------------------

    def evaluate(self, point, mode: str = "exact"):
        """Evaluate at a point; mode is one of exact | float | interval."""
        if mode == "exact":
            den = self.den.evaluate_exact(point)
            if den == 0:
                raise DivisionByZero("exact denominator evaluates to zero")
            return self.num.evaluate_exact(point) / den
        if mode == "float":
            den = self.den.evaluate_float(point)
            if den == 0.0:
                raise DivisionByZero("float denominator evaluates to zero")
            return self.num.evaluate_float(point) / den
        if mode == "interval":
            den = self.den.evaluate_interval(point)
            if den.contains_zero():
                raise DivisionByZero("interval denominator contains zero")
            return self.num.evaluate_interval(point) / den
        raise ValueError(f"unknown evaluation mode {mode!r}")

    def float_evaluator(self):
        num_ev = self.num.float_evaluator()
        den_ev = self.den.float_evaluator()

        def ev(point):
            d = den_ev(point)
            if d == 0.0:
                raise DivisionByZero("float denominator evaluates to zero")
            return num_ev(point) / d

        return ev

    def reduced(self) -> "RationalFunction":
        """Cancel the multivariate gcd of the pair.

        Not part of normalization (normalization is content+sign only); used
        where iterated composition would otherwise grow multiplicatively,
        e.g. symbolic orbits.
        """
        from .gcdtools import reduce_fraction

        num, den = reduce_fraction(self.num, self.den)
        return RationalFunction(num, den)

    def remap(self, new_context, rename=None) -> "RationalFunction":
        return RationalFunction(
            self.num.remap(new_context, rename), self.den.remap(new_context, rename)
        )

    def substitute_values(self, values) -> "RationalFunction":
        den = self.den.substitute_values(values)
        if den.is_zero():
            raise ZeroDenominator("denominator vanished under substitution")
        return RationalFunction(self.num.substitute_values(values), den)


# Module-level operation names used throughout the package and the CLI.

def rf_normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    return RationalFunction(num, den)


def rf_equal(a: RationalFunction, b: RationalFunction) -> bool:
    return a.equal(b)


def differentiate(f: RationalFunction, var: str) -> RationalFunction:
    return f.differentiate(var)


def compose(f: RationalFunction, subs: Mapping[str, RationalFunction]) -> RationalFunction:
    return f.compose(subs)


def evaluate(f: RationalFunction, point, mode: str = "exact"):
    return f.evaluate(point, mode)
