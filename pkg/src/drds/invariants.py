"""Automated discovery of rational invariants P(x)/(x_1...x_k) = const.

The ansatz takes every monomial of total degree <= d in the k state
variables, imposes I(shift(x)) = I(x) under the recurrence, clears
denominators, and reads the resulting polynomial identity as an exact
linear system in the unknown coefficients; the nullspace basis is the
invariant family.  With a declared parameter the system is solved at
several rational parameter values, the coefficients interpolated as
polynomials in the parameter, and the result re-verified symbolically
(which is what makes the shortcut sound).

Positive-coefficient invariants bound orbits: every term of I is positive
on positive states and dominated by the conserved value, which turns
individual monomials into explicit coordinate bounds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InterpolationMismatch, NotPositive
from .parsing import format_polynomial
from .poly import Polynomial, RationalFunction, grlex_key, monomials_up_to_degree
from .systems import DifferenceEquation, Transformation, companion_map, orbit


@dataclass(frozen=True)
class InvariantAnsatz:
    order: int
    degree: int
    monomials: tuple     # graded-lex descending exponent vectors

    @staticmethod
    def create(order: int, degree: int) -> "InvariantAnsatz":
        return InvariantAnsatz(order, degree,
                               tuple(monomials_up_to_degree(order, degree)))

    @property
    def size(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True)
class Invariant:
    """I = P / (x_1 ... x_k); P has exact rational coefficients, or exact
    polynomial-in-parameter coefficients (parameters are extra context
    variables of P)."""

    P: Polynomial
    order: int
    parameters: tuple = ()

    @property
    def state_variables(self):
        return tuple(f"x{i}" for i in range(1, self.order + 1))

    def instantiate(self, values) -> "Invariant":
        P = self.P.substitute_values({p: Fraction(values[p]) for p in self.parameters})
        return Invariant(P=P, order=self.order, parameters=())

    def value_exact(self, state) -> Fraction:
        state = [Fraction(s) for s in state]
        denom = Fraction(1)
        for s in state:
            denom *= s
        return self.P.evaluate_exact(state) / denom

    def value_float(self, state) -> float:
        denom = 1.0
        for s in state:
            denom *= s
        return self.P.evaluate_float([float(s) for s in state]) / denom

    def __str__(self):
        vars_text = "*".join(self.state_variables)
        return f"({format_polynomial(self.P)})/({vars_text})"


# --- exact linear algebra ------------------------------------------------------


def rref(rows: list) -> list:
    """Reduced row echelon form over Fraction; returns nonzero rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return []
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pivot = None
        for r in range(pivot_row, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        pv = rows[pivot_row][col]
        rows[pivot_row] = [v / pv for v in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return [r for r in rows if any(v != 0 for v in r)]


def nullspace(rows: list, ncols: int) -> list:
    """Canonical nullspace basis of the row system (RREF-normalized)."""
    reduced = rref(rows)
    pivots = {}
    for r in reduced:
        for c, v in enumerate(r):
            if v != 0:
                pivots[c] = r
                break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for c, row in pivots.items():
            vec[c] = -row[f]
        basis.append(vec)
    return rref(basis)


# --- system assembly -------------------------------------------------------------


def _shift_data(eq: DifferenceEquation):
    """Companion shift of the state: (x1,...,xk) -> (x2,...,xk, F)."""
    tr = companion_map(eq)
    ctx = tr.context
    last = tr.components[-1]
    return tr, ctx, last.num, last.den


def _invariance_rows(eq: DifferenceEquation, ansatz: InvariantAnsatz):
    """Bracket polynomial per ansatz monomial; the invariance condition is
    sum_m c_m * bracket_m == 0 identically."""
    k = eq.order
    d = ansatz.degree
    tr, ctx, n, den = _shift_data(eq)
    shifted_nums = [RationalFunction.variable(ctx, f"x{i}") for i in range(2, k + 1)]
    one = Polynomial.constant(ctx, 1)
    nums = [r.num for r in shifted_nums] + [n]
    dens = [one for _ in shifted_nums] + [den]
    # parameters substitute for themselves with clearing degree 0
    for p in eq.parameters:
        nums.append(Polynomial.variable(ctx, p))
        dens.append(one)
    clearing = (d,) * k + (0,) * len(eq.parameters)

    prod_all = one
    for i in range(1, k + 1):
        prod_all = prod_all * Polynomial.variable(ctx, f"x{i}")
    prod_tail = one
    for i in range(2, k + 1):
        prod_tail = prod_tail * Polynomial.variable(ctx, f"x{i}")
    den_pow = one
    for _ in range(d - 1):
        den_pow = den_pow * den
    tail_factor = den_pow * n * prod_tail

    brackets = []
    for mono in ansatz.monomials:
        m_poly = Polynomial(ctx, {mono + (0,) * (len(ctx) - k): Fraction(1)})
        shifted = m_poly.compose_cleared(nums, dens, clearing)
        brackets.append(shifted * prod_all - m_poly * tail_factor)
    return brackets


def _rows_from_brackets(brackets):
    """Collect bracket polynomials into an exact coefficient matrix."""
    all_monos = sorted({m for b in brackets for m in b.terms},
                       key=grlex_key, reverse=True)
    index = {m: i for i, m in enumerate(all_monos)}
    rows = [[Fraction(0)] * len(brackets) for _ in all_monos]
    for col, b in enumerate(brackets):
        for m, c in b.terms.items():
            rows[index[m]][col] = c
    return rows


def _trivial_vector(ansatz: InvariantAnsatz):
    vec = [Fraction(0)] * ansatz.size
    ones = (1,) * ansatz.order
    if ones in ansatz.monomials:
        vec[ansatz.monomials.index(ones)] = Fraction(1)
    return vec


def _vector_to_polynomial(vec, ansatz: InvariantAnsatz, context, extra=()):
    pad = (0,) * len(extra)
    terms = {}
    for coeff, mono in zip(vec, ansatz.monomials):
        if coeff != 0:
            terms[mono + pad] = coeff
    return Polynomial(context, terms)


# --- interpolation (single parameter) ----------------------------------------------


def _lagrange(points) -> list:
    """Coefficient list (low to high) through exact points [(t, y), ...]."""
    coeffs = [Fraction(0)]

    def poly_mul(a, b):
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    for i, (ti, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (tj, _) in enumerate(points):
            if j == i:
                continue
            basis = poly_mul(basis, [-tj, Fraction(1)])
            denom *= ti - tj
        scaled = [yi * c / denom for c in basis]
        coeffs = [a + b for a, b in
                  zip(coeffs + [Fraction(0)] * (len(scaled) - len(coeffs)),
                      scaled + [Fraction(0)] * max(0, len(coeffs) - len(scaled)))]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs or [Fraction(0)]


def _eval_coeff_poly(coeffs, t: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * t + c
    return total


# --- public operations ---------------------------------------------------------------


def find_invariant(eq: DifferenceEquation, d: int, seed: int = 20250810) -> list:
    """Nullspace basis of invariants with numerator degree <= d.

    The trivial direction P = x_1...x_k (a constant invariant) is filtered
    out.  Returns [] when only the trivial invariant exists.  Every returned
    invariant is re-verified symbolically, parameters included.
    """
    if eq.order < 1 or d < 1:
        raise ValueError("need order >= 1 and degree >= 1")
    ansatz = InvariantAnsatz.create(eq.order, d)
    if not eq.parameters:
        brackets = _invariance_rows(eq, ansatz)
        rows = _rows_from_brackets(brackets)
        basis = nullspace(rows, ansatz.size)
        trivial = _trivial_vector(ansatz)
        vars_ctx = tuple(f"x{i}" for i in range(1, eq.order + 1))
        out = []
        for vec in basis:
            if vec == trivial:
                continue
            P = _vector_to_polynomial(vec, ansatz, vars_ctx)
            inv = Invariant(P=P, order=eq.order)
            if not verify_invariant(eq, inv):
                raise AssertionError("nullspace vector failed symbolic verification")
            out.append(inv)
        return out

    if len(eq.parameters) != 1:
        raise ValueError("parameter interpolation supports exactly one parameter")
    param = eq.parameters[0]
    nsolve = max(8, ansatz.size)
    nholdout = 3
    rng = random.Random(seed)
    values = set()
    while len(values) < nsolve + nholdout:
        values.add(Fraction(rng.randint(1, 60), rng.randint(1, 6)))
    values = sorted(values)
    solve_pts, holdout_pts = values[:nsolve], values[nsolve:]

    def solved_basis(pval):
        inst = eq.instantiate({param: pval})
        brackets = _invariance_rows(inst, ansatz)
        rows = _rows_from_brackets(brackets)
        basis = nullspace(rows, ansatz.size)
        trivial = _trivial_vector(ansatz)
        basis = [v for v in basis if v != trivial]
        pattern = tuple(next(i for i, c in enumerate(v) if c != 0) for v in basis)
        return basis, pattern

    solved = [solved_basis(p) for p in solve_pts]
    dims = {len(b) for b, _ in solved}
    patterns = {pat for _, pat in solved}
    if len(dims) != 1 or len(patterns) != 1:
        raise InterpolationMismatch(
            "nullspace structure varies across parameter samples; "
            "the family is not uniform in the parameter at this degree"
        )
    dim = dims.pop()
    if dim == 0:
        return []

    vars_ctx = tuple(f"x{i}" for i in range(1, eq.order + 1))
    full_ctx = vars_ctx + (param,)
    out = []
    for which in range(dim):
        coeff_polys = []
        for col in range(ansatz.size):
            pts = [(p, solved[i][0][which][col]) for i, p in enumerate(solve_pts)]
            coeff_polys.append(_lagrange(pts))
        # held-out validation before the symbolic check
        for hp in holdout_pts:
            hbasis, hpattern = solved_basis(hp)
            if len(hbasis) != dim:
                raise InterpolationMismatch("held-out sample changes the nullspace dimension")
            predicted = [_eval_coeff_poly(c, hp) for c in coeff_polys]
            if predicted != hbasis[which]:
                raise InterpolationMismatch(
                    f"interpolated coefficients disagree with the held-out solve at {hp}"
                )
        terms = {}
        for col, cpoly in enumerate(coeff_polys):
            mono = ansatz.monomials[col]
            for j, cj in enumerate(cpoly):
                if cj != 0:
                    terms[mono + (j,)] = cj
        P = Polynomial(full_ctx, terms)
        inv = Invariant(P=P, order=eq.order, parameters=(param,))
        if not verify_invariant(eq, inv):
            raise InterpolationMismatch(
                "interpolated invariant failed the final symbolic verification"
            )
        out.append(inv)
    return out


def verify_invariant(eq: DifferenceEquation, inv: Invariant) -> bool:
    """Exact check that I(shift(x)) - I(x) == 0, parameters symbolic."""
    tr = companion_map(eq)
    ctx = tr.context
    k = eq.order
    P = inv.P if inv.P.context == ctx else inv.P.remap(ctx)
    denom = Polynomial.constant(ctx, 1)
    for i in range(1, k + 1):
        denom = denom * Polynomial.variable(ctx, f"x{i}")
    I = RationalFunction(P, denom)
    subs = {f"x{i}": RationalFunction.variable(ctx, f"x{i + 1}") for i in range(1, k)}
    subs[f"x{k}"] = tr.components[-1]
    for p in eq.parameters:
        subs[p] = RationalFunction.variable(ctx, p)
    shifted = I.compose(subs)
    return (shifted - I).num.is_zero()


@dataclass(frozen=True)
class BoundednessCertificate:
    invariant: Invariant
    initial: tuple
    constant: Fraction
    upper: tuple          # per-coordinate Fraction bound or None
    lower: tuple          # per-coordinate Fraction bound or None
    notes: str = ""


def boundedness_certificate(inv: Invariant, init, param_values=None) -> BoundednessCertificate:
    """Orbit box from a positive-coefficient invariant.

    With C = P(init)/prod(init): a term a*x^e with e = (1,..,1)+unit_i gives
    a*x_i <= C along the orbit; the constant term a0 gives prod(x) >= a0/C,
    which combines with the upper bounds into per-coordinate lower bounds.
    Missing monomials make the corresponding bounds unavailable (flagged).
    """
    if inv.parameters:
        if not param_values:
            raise ValueError("instantiate the invariant's parameters")
        inv = inv.instantiate(param_values)
    if not inv.P.terms:
        raise NotPositive("empty invariant numerator")
    if any(c <= 0 for c in inv.P.terms.values()):
        raise NotPositive("invariant numerator has a non-positive coefficient")
    init = tuple(Fraction(v) for v in init)
    if any(v <= 0 for v in init):
        raise ValueError("initial state must be positive")
    k = inv.order
    C = inv.value_exact(init)

    upper = []
    notes = []
    ones = (1,) * k
    for i in range(k):
        mono = tuple(o + (1 if j == i else 0) for j, o in enumerate(ones))
        a = inv.P.coefficient(mono)
        if a > 0:
            upper.append(C / a)
        else:
            upper.append(None)
            notes.append(f"no x{i + 1}*x1*...*xk term: upper bound for x{i + 1} unavailable")
    a0 = inv.P.coefficient((0,) * k)
    lower = []
    if a0 > 0 and all(u is not None for u in upper):
        prod_min = a0 / C
        for i in range(k):
            rest = Fraction(1)
            for j in range(k):
                if j != i:
                    rest *= upper[j]
            lower.append(prod_min / rest)
    else:
        lower = [None] * k
        if a0 <= 0:
            notes.append("no constant term: lower bounds unavailable")
    return BoundednessCertificate(
        invariant=inv, initial=init, constant=C,
        upper=tuple(upper), lower=tuple(lower), notes="; ".join(notes),
    )


def factored_guess(inv: Invariant, shift_bound: int = 6):
    """Human-friendly factored form, when a trial factorization succeeds.

    Searches P + t*(x_1...x_k) for small shifts t (integers, plus c + p for
    a declared parameter p) that split into (x_i + 1) factors times one
    affine factor.  Returns a display string or None; purely cosmetic."""
    from .gcdtools import exact_divide

    ctx = inv.P.context
    k = inv.order
    trivial = Polynomial.constant(ctx, 1)
    for i in range(1, k + 1):
        trivial = trivial * Polynomial.variable(ctx, f"x{i}")

    shifts = [Polynomial.constant(ctx, c) for c in range(-shift_bound, shift_bound + 1)]
    for p in inv.parameters:
        pvar = Polynomial.variable(ctx, p)
        shifts.extend(pvar + Polynomial.constant(ctx, c)
                      for c in range(-shift_bound, shift_bound + 1))

    for t in shifts:
        cand = inv.P + trivial * t
        if cand.is_zero():
            continue
        rem = cand
        pieces = []
        for i in range(1, k + 1):
            factor = Polynomial.variable(ctx, f"x{i}") + Polynomial.constant(ctx, 1)
            while True:
                q = exact_divide(rem, factor)
                if q is None:
                    break
                rem = q
                pieces.append(f"x{i} + 1")
        if pieces and rem.total_degree() <= 1:
            head = f"({format_polynomial(rem)})" if not rem.is_constant() else format_polynomial(rem)
            body = "*".join([head] + [f"({p})" for p in pieces])
            if t.is_zero():
                return body
            shift_txt = format_polynomial(t)
            vars_txt = "*".join(f"x{i}" for i in range(1, k + 1))
            return f"{body} - ({shift_txt})*{vars_txt}"
    return None


def invariant_drift(eq: DifferenceEquation, inv: Invariant, init, N: int,
                    param_values=None) -> float:
    """max_n |I_n - I_0| / |I_0| along an N-step float orbit."""
    if inv.parameters:
        if not param_values:
            raise ValueError("instantiate the invariant's parameters")
        inv = inv.instantiate(param_values)
    run_eq = eq.instantiate(param_values) if eq.parameters else eq
    ob = orbit(run_eq, init, N, mode="float")
    values = [inv.value_float(state) for state in ob.states]
    base = values[0]
    if base == 0.0:
        return max(abs(v - base) for v in values)
    return max(abs(v - base) / abs(base) for v in values)
