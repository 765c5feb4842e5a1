"""Exact multivariate polynomial gcd and divisibility over the rationals.

General rational-function normalization deliberately avoids gcd
cancellation, but symbolic orbits would blow up multiplicatively without
it: every composition step piles the previous denominators onto both
sides of the fraction.  The routines here implement a primitive
pseudo-remainder sequence (recursing on the leading variable) which is
entirely adequate at the handful-of-variables, modest-degree scale that
periodicity checks and cycle verifications produce.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial


def _main_variable(p: Polynomial):
    """Index of the first context variable with positive degree, or None."""
    degs = p.per_variable_degrees()
    for i, d in enumerate(degs):
        if d > 0:
            return i
    return None


def _as_univariate(p: Polynomial, i: int) -> list:
    """Coefficient list in variable i (low to high), entries are Polynomials
    over the same context with variable i absent from their monomials."""
    deg = p.per_variable_degrees()[i]
    coeffs = [dict() for _ in range(deg + 1)]
    for m, c in p.terms.items():
        reduced = m[:i] + (0,) + m[i + 1:]
        coeffs[m[i]][reduced] = coeffs[m[i]].get(reduced, Fraction(0)) + c
    return [Polynomial(p.context, terms) for terms in coeffs]


def _from_univariate(coeffs: list, i: int, context) -> Polynomial:
    terms = {}
    for e, poly in enumerate(coeffs):
        for m, c in poly.terms.items():
            key = m[:i] + (e,) + m[i + 1:]
            terms[key] = terms.get(key, Fraction(0)) + c
    return Polynomial(context, terms)


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def exact_divide(a: Polynomial, b: Polynomial):
    """Exact quotient a/b, or None when b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return Polynomial.zero(a.context)
    if b.is_constant():
        return a * (1 / b.constant_value())
    i = _main_variable(b)
    A = _trim(_as_univariate(a, i))
    B = _trim(_as_univariate(b, i))
    if len(A) < len(B):
        return None
    context = a.context
    quotient = [Polynomial.zero(context) for _ in range(len(A) - len(B) + 1)]
    lead = B[-1]
    while A and len(A) >= len(B):
        q = exact_divide(A[-1], lead)
        if q is None:
            return None
        shift = len(A) - len(B)
        quotient[shift] = q
        for j, bc in enumerate(B):
            A[shift + j] = A[shift + j] - q * bc
        A = _trim(A)
    if A:
        return None
    return _from_univariate(quotient, i, context)


def _content(coeffs: list) -> Polynomial:
    """gcd of a univariate polynomial's coefficient polynomials."""
    g = None
    for c in coeffs:
        if c.is_zero():
            continue
        g = c if g is None else multivariate_gcd(g, c)
        if g.is_constant():
            break
    return g if g is not None else Polynomial.zero(coeffs[0].context)


def _primitive_part(coeffs: list):
    cont = _content(coeffs)
    if cont.is_constant():
        value = cont.constant_value()
        return [c * (1 / value) for c in coeffs], Polynomial.constant(cont.context, 1)
    return [exact_divide(c, cont) for c in coeffs], cont


def _pseudo_remainder(A: list, B: list) -> list:
    """prem(A, B) in the shared main variable; coefficients are Polynomials."""
    A = list(A)
    lead = B[-1]
    steps = len(A) - len(B) + 1
    for _ in range(steps):
        if len(A) < len(B):
            break
        shift = len(A) - len(B)
        top = A[-1]
        A = [c * lead for c in A]
        for j, bc in enumerate(B):
            A[shift + j] = A[shift + j] - top * bc
        A = _trim(A)
        if not A:
            break
    return A


def multivariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd over Q[context], normalized to a positive leading coefficient.

    Constants behave as units: the gcd of a nonzero constant with anything
    is 1.  Primitive pseudo-remainder sequence in the first active variable.
    """
    if a.context != b.context:
        raise ValueError("context mismatch in gcd")
    if a.is_zero() and b.is_zero():
        return Polynomial.zero(a.context)
    one = Polynomial.constant(a.context, 1)
    if a.is_zero():
        return _normalize_sign(b)
    if b.is_zero():
        return _normalize_sign(a)
    if a.is_constant() or b.is_constant():
        return one

    ia, ib = _main_variable(a), _main_variable(b)
    i = min(ia, ib)
    if ia != ib:
        # the smaller-index variable is missing from one side: gcd must not
        # involve it, so it divides the content of the side that has it
        if ia < ib:
            cont = _content(_trim(_as_univariate(a, ia)))
            return multivariate_gcd(cont, b)
        cont = _content(_trim(_as_univariate(b, ib)))
        return multivariate_gcd(a, cont)

    A = _trim(_as_univariate(a, i))
    B = _trim(_as_univariate(b, i))
    if len(A) < len(B):
        A, B = B, A
    A, cont_a = _primitive_part(A)
    B, cont_b = _primitive_part(B)
    cont_gcd = multivariate_gcd(cont_a, cont_b)

    while B:
        R = _pseudo_remainder(A, B)
        if not R:
            break
        R, _ = _primitive_part(R)
        A, B = B, R
    if B:
        A = B
    prim = _from_univariate(A, i, a.context)
    result = prim if cont_gcd.is_constant() else prim * cont_gcd
    return _normalize_sign(result)


def _normalize_sign(p: Polynomial) -> Polynomial:
    lc = p.leading_coefficient()
    if lc == 0:
        return p
    return p * (1 / lc) if lc != 1 else p


def reduce_fraction(num: Polynomial, den: Polynomial):
    """Cancel the multivariate gcd from a numerator/denominator pair."""
    if num.is_zero():
        return num, Polynomial.constant(den.context, 1)
    g = multivariate_gcd(num, den)
    if g.is_constant() or g.is_zero():
        return num, den
    qn = exact_divide(num, g)
    qd = exact_divide(den, g)
    if qn is None or qd is None:
        # gcd implementation returned a non-divisor: fall back untouched
        return num, den
    return qn, qd
