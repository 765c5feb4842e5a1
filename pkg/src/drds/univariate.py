"""Dense univariate polynomials over Fraction: Sturm chains and real roots.

Root isolation uses exact sign-change counting on the Sturm sequence of
the square-free part, then bisection with rational endpoints, so every
isolating interval provably contains exactly one real root.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Polynomial


def from_polynomial(p: Polynomial, var: str | None = None) -> list:
    """Dense coefficient list (low to high) of an effectively univariate
    Polynomial."""
    degs = p.per_variable_degrees()
    active = [i for i, d in enumerate(degs) if d > 0]
    if len(active) > 1:
        raise ValueError("polynomial involves more than one variable")
    if var is not None:
        idx = p.context.index(var)
        if active and active[0] != idx:
            raise ValueError(f"polynomial does not live in variable {var}")
    else:
        idx = active[0] if active else 0
    deg = degs[idx] if p.context else 0
    coeffs = [Fraction(0)] * (deg + 1)
    for m, c in p.terms.items():
        coeffs[m[idx] if p.context else 0] += c
    return trim(coeffs)


def trim(coeffs: list) -> list:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(coeffs: list) -> int:
    return len(coeffs) - 1


def evaluate(coeffs: list, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def derivative(coeffs: list) -> list:
    return trim([c * i for i, c in enumerate(coeffs)][1:])


def remainder(a: list, b: list) -> list:
    """Remainder of a by b over the rationals."""
    a = list(a)
    lead = b[-1]
    while len(a) >= len(b) and a:
        q = a[-1] / lead
        shift = len(a) - len(b)
        for j, bc in enumerate(b):
            a[shift + j] -= q * bc
        a = trim(a)
    return a


def gcd(a: list, b: list) -> list:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, remainder(a, b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def square_free_part(coeffs: list) -> list:
    d = derivative(coeffs)
    if not d:
        return trim(coeffs)
    g = gcd(coeffs, d)
    if degree(g) == 0:
        return trim(coeffs)
    q = exact_quotient(coeffs, g)
    return q


def exact_quotient(a: list, b: list) -> list:
    a = list(a)
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        q = a[-1] / lead
        shift = len(a) - len(b)
        out[shift] = q
        for j, bc in enumerate(b):
            a[shift + j] -= q * bc
        a = trim(a)
    if a:
        raise ValueError("not an exact division")
    return trim(out)


def sturm_chain(coeffs: list) -> list:
    chain = [trim(coeffs), derivative(coeffs)]
    while chain[-1]:
        r = remainder(chain[-2], chain[-1])
        chain.append([-c for c in r])
    chain.pop()
    return chain


def sign_changes(chain: list, x: Fraction) -> int:
    signs = []
    for c in chain:
        v = evaluate(c, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_in(chain: list, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return sign_changes(chain, lo) - sign_changes(chain, hi)


def root_bound(coeffs: list) -> Fraction:
    """Cauchy bound: all real roots lie in (-M, M)."""
    lead = abs(coeffs[-1])
    m = max((abs(c) for c in coeffs[:-1]), default=Fraction(0))
    return 1 + m / lead


def isolate_real_roots(coeffs: list) -> list:
    """Disjoint rational intervals (lo, hi], one distinct real root each.

    Intervals never straddle zero, so the sign of the enclosed root can be
    read off the endpoints.
    """
    coeffs = trim(coeffs)
    if degree(coeffs) < 1:
        return []
    sf = square_free_part(coeffs)
    chain = sturm_chain(sf)
    M = root_bound(sf)

    result = []

    def split(lo, hi):
        n = count_roots_in(chain, lo, hi)
        if n == 0:
            return
        if n == 1 and not (lo < 0 < hi):
            result.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if evaluate(sf, mid) == 0:
            # exact rational root at the midpoint: give it a tiny interval
            eps = (hi - lo) / 4
            while count_roots_in(chain, mid - eps, mid + eps) > 1:
                eps /= 2
            result.append((mid - eps, mid + eps))
            split(lo, mid - eps)
            split(mid + eps, hi)
            return
        split(lo, mid)
        split(mid, hi)

    split(-M, M)
    result.sort(key=lambda iv: iv[0])
    return result


def refine_root(coeffs: list, lo: Fraction, hi: Fraction, tol: Fraction) -> tuple:
    """Shrink an isolating interval by bisection until hi - lo <= tol."""
    sf = square_free_part(trim(coeffs))
    flo = evaluate(sf, lo)
    fhi = evaluate(sf, hi)
    if flo == 0:
        return (lo, lo)
    if fhi == 0:
        return (hi, hi)
    if (flo > 0) == (fhi > 0):
        raise ValueError("interval endpoints do not bracket a sign change")
    lo, hi = Fraction(lo), Fraction(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = evaluate(sf, mid)
        if fm == 0:
            return (mid, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return (lo, hi)


def _divisors(n: int, limit: int = 100_000) -> list:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n and d <= limit:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def rational_roots(coeffs: list) -> list:
    """All rational roots, found exactly (integerized rational-root test).

    Degree-1 factors are always solved directly; for higher degrees the
    divisor enumeration is skipped when the constant/leading integers are
    too composite-large to enumerate quickly.
    """
    coeffs = trim(coeffs)
    if degree(coeffs) < 1:
        return []
    if degree(coeffs) == 1:
        return [-coeffs[0] / coeffs[1]]
    from math import lcm

    den = lcm(*[c.denominator for c in coeffs])
    ints = [int(c * den) for c in coeffs]
    roots = []
    if ints and ints[0] == 0:
        roots.append(Fraction(0))
        while ints and ints[0] == 0:
            ints = ints[1:]
    if len(ints) < 2:
        return sorted(set(roots))
    a0, an = ints[0], ints[-1]
    if abs(a0) > 10**12 or abs(an) > 10**12:
        return sorted(set(roots))
    for p in _divisors(a0):
        for q in _divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if evaluate(coeffs, cand) == 0:
                    roots.append(cand)
    return sorted(set(roots))
