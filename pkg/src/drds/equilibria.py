"""Fixed points of transformations and local stability from the Jacobian.

Exact work happens on the diagonal (every fixed point of a companion map
is diagonal, and substituting the equilibrium symbol into the recurrence
gives one univariate polynomial); in general the solver is a multistart
damped Newton iteration on the cross-multiplied residual system, which
finds fixed points reliably at desk scale but is not guaranteed complete.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import univariate as up
from .errors import DegenerateEquation, DivisionByZero, JacobianSingularEvaluation
from .parsing import format_polynomial
from .poly import Polynomial, RationalFunction
from .systems import DifferenceEquation, Transformation, companion_map

STABILITY_MARGIN = 1e-6
DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class DiagonalRoot:
    """One real solution of the substituted equilibrium polynomial."""

    minimal_polynomial: Polynomial       # univariate, primitive, positive leading coeff
    isolating_interval: tuple            # (lo, hi) Fractions, one root inside
    positive: bool
    value: float
    exact_value: Fraction | None = None  # set when the root is rational

    @property
    def polynomial_text(self) -> str:
        return format_polynomial(self.minimal_polynomial)


@dataclass(frozen=True)
class FixedPoint:
    coords: tuple
    positive: bool
    exact_witness: DiagonalRoot | None = None
    exact_coords: tuple | None = None
    degenerate: bool = False

    def as_floats(self):
        return [float(c) for c in self.coords]


@dataclass(frozen=True)
class StabilityReport:
    point: FixedPoint
    eigenvalues: tuple
    spectral_radius: float
    verdict: str  # stable | unstable | marginal
    margin: float = STABILITY_MARGIN


def _primitive(poly: Polynomial) -> Polynomial:
    """Integer-primitive, positive-leading-coefficient scalar multiple."""
    if poly.is_zero():
        return poly
    num_gcd = 0
    den_lcm = 1
    for c in poly.terms.values():
        num_gcd = math.gcd(num_gcd, abs(c.numerator))
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    content = Fraction(num_gcd, den_lcm)
    if poly.leading_coefficient() < 0:
        content = -content
    return poly * (1 / content)


def diagonal_polynomial(eq: DifferenceEquation) -> Polynomial:
    """Substitute the equilibrium symbol for every lag and cross-multiply."""
    if eq.parameters:
        raise ValueError("instantiate parameters before equilibrium analysis")
    ctx = ("x",)
    rename = {lag: "x" for lag in eq.lag_names}
    num = eq.rhs.num.remap(ctx, rename)
    den = eq.rhs.den.remap(ctx, rename)
    poly = Polynomial.variable(ctx, "x") * den - num
    if poly.is_zero():
        raise DegenerateEquation("every point solves the equilibrium equation")
    return _primitive(poly)


def diagonal_equilibria(eq: DifferenceEquation) -> list:
    """All real diagonal equilibria with exact isolating intervals.

    Cross-multiplication can manufacture roots at which the recurrence
    denominator itself vanishes (the rhs is undefined there); those are
    excluded via an exact univariate gcd check.
    """
    poly = diagonal_polynomial(eq)
    coeffs = up.from_polynomial(poly, "x")
    ctx = ("x",)
    den_diag = up.from_polynomial(
        eq.rhs.den.remap(ctx, {lag: "x" for lag in eq.lag_names}), "x"
    )
    common = up.gcd(coeffs, den_diag) if up.degree(den_diag) >= 1 else []
    common_chain = up.sturm_chain(common) if up.degree(common) >= 1 else None
    intervals = up.isolate_real_roots(coeffs)
    rats = set(up.rational_roots(coeffs))
    out = []
    for lo, hi in intervals:
        if common_chain is not None and up.count_roots_in(common_chain, lo, hi) > 0:
            continue
        exact = next((r for r in rats if lo < r <= hi or lo == hi == r), None)
        rlo, rhi = up.refine_root(coeffs, lo, hi, Fraction(1, 10**17))
        value = float((rlo + rhi) / 2) if exact is None else float(exact)
        out.append(
            DiagonalRoot(
                minimal_polynomial=poly,
                isolating_interval=(lo, hi),
                positive=lo >= 0 or (exact is not None and exact > 0),
                value=value,
                exact_value=exact,
            )
        )
    return out


def refine_diagonal_root(eq: DifferenceEquation, root: DiagonalRoot, tol: Fraction) -> Fraction:
    """Rational approximation of a diagonal root to within tol (exact when known)."""
    if root.exact_value is not None:
        return root.exact_value
    coeffs = up.from_polynomial(root.minimal_polynomial, "x")
    lo, hi = up.refine_root(coeffs, *root.isolating_interval, tol)
    return (lo + hi) / 2


# --- numeric multistart fixed points ------------------------------------------


def _residual_system(tr: Transformation):
    """Cross-multiplied residual g_i = num_i - x_i * den_i and its Jacobian."""
    if tr.parameters:
        raise ValueError("instantiate parameters before fixed-point search")
    g = []
    for var, comp in zip(tr.variables, tr.components):
        xi = Polynomial.variable(comp.context, var)
        g.append(comp.num - xi * comp.den)
    jac = [[gi.differentiate(v) for v in tr.variables] for gi in g]
    return g, jac


def _newton_starts(rng, k, attempts):
    """Positive, negative and mixed-sign real starts over a wide range."""
    starts = []
    for j in range(attempts):
        mags = [10.0 ** rng.uniform(-2.0, 2.5) for _ in range(k)]
        family = j % 3
        if family == 0:
            signs = [1.0] * k
        elif family == 1:
            signs = [-1.0] * k
        else:
            signs = [rng.choice((-1.0, 1.0)) for _ in range(k)]
        starts.append([s * m for s, m in zip(signs, mags)])
    return starts


def fixed_points_numeric(tr: Transformation, attempts: int = 200, seed: int = 0,
                         tol: float = 1e-8) -> list:
    """Multistart damped Newton on T(x) - x = 0 (cross-multiplied form).

    Every returned point satisfies |T(x) - x|_inf <= tol, re-checked on the
    rational form directly.  Deduplicated within 1e-6, deterministically
    sorted.  Completeness is NOT guaranteed.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    k = tr.dim
    g, jac = _residual_system(tr)
    degenerate = all(gi.is_zero() for gi in g)
    g_ev = [gi.float_evaluator() for gi in g]
    jac_ev = [[e.float_evaluator() for e in row] for row in jac]
    comp_ev = [c.float_evaluator() for c in tr.components]

    def residual(x):
        return np.array([ev(x) for ev in g_ev])

    def map_residual_inf(x):
        try:
            image = [ev(list(x)) for ev in comp_ev]
        except DivisionByZero:
            return math.inf
        return max(abs(a - b) for a, b in zip(image, x))

    rng = random.Random(seed)
    found = []
    for start in _newton_starts(rng, k, attempts):
        x = np.array(start, dtype=float)
        if degenerate:
            candidates = [x]
        else:
            ok = False
            for _ in range(200):
                r = residual(x)
                J = np.array([[ev(list(x)) for ev in row] for row in jac_ev])
                try:
                    step = np.linalg.solve(J, r)
                except np.linalg.LinAlgError:
                    break
                base = float(np.linalg.norm(r))
                t = 1.0
                for _ in range(60):
                    cand = x - t * step
                    if float(np.linalg.norm(residual(cand))) < base:
                        break
                    t *= 0.5
                else:
                    break
                x = x - t * step
                if float(np.linalg.norm(t * step)) < 1e-14 * (1.0 + float(np.linalg.norm(x))):
                    ok = True
                    break
            if not ok and float(np.linalg.norm(residual(x))) > 1e-9:
                continue
            candidates = [x]
        for cand in candidates:
            if not all(math.isfinite(c) for c in cand):
                continue
            if map_residual_inf(cand) > tol:
                continue
            if any(max(abs(a - b) for a, b in zip(cand, f.coords)) <= DEDUP_TOL for f in found):
                continue
            found.append(
                FixedPoint(
                    coords=tuple(float(c) for c in cand),
                    positive=all(c > 0 for c in cand),
                    degenerate=degenerate,
                )
            )
    found.sort(key=lambda f: f.coords)
    return found


def positive_fixed_points(tr: Transformation, attempts: int = 200, seed: int = 0,
                          tol: float = 1e-8) -> list:
    """Fixed points with all coordinates strictly positive."""
    return [f for f in fixed_points_numeric(tr, attempts, seed, tol) if f.positive]


def exact_rational_fixed_point(tr: Transformation, approx, max_denominator: int = 10**9):
    """Reconstruct an exactly rational fixed point from a float approximation,
    verified by exact evaluation; None if the point is not rational (or not
    reconstructible at this denominator bound)."""
    candidate = tuple(Fraction(float(c)).limit_denominator(max_denominator) for c in approx)
    try:
        image = tr.apply_exact(list(candidate))
    except (DivisionByZero, ZeroDivisionError):
        return None
    if all(a == b for a, b in zip(image, candidate)):
        return candidate
    return None


# --- local stability ---------------------------------------------------------------


def jacobian(tr: Transformation) -> list:
    """Symbolic Jacobian matrix of the map (quotient-rule derivatives)."""
    return [[c.differentiate(v) for v in tr.variables] for c in tr.components]


def local_stability(tr: Transformation, fp: FixedPoint) -> StabilityReport:
    """Eigenvalue verdict at a fixed point.

    Evaluates the symbolic Jacobian at the point in float64 and computes all
    k eigenvalues; a verdict within `margin` of the unit circle is reported
    marginal, never stable (float eigenvalues cannot certify the boundary).
    """
    point = fp.as_floats()
    J = np.zeros((tr.dim, tr.dim))
    for i, row in enumerate(jacobian(tr)):
        for j, entry in enumerate(row):
            den = entry.den.evaluate_float(point)
            if den == 0.0:
                raise JacobianSingularEvaluation(
                    f"Jacobian entry ({i},{j}) denominator vanishes at the fixed point"
                )
            J[i, j] = entry.num.evaluate_float(point) / den
    eigs = np.linalg.eigvals(J)
    rho = float(max(abs(e) for e in eigs))
    if rho < 1.0 - STABILITY_MARGIN:
        verdict = "stable"
    elif rho > 1.0 + STABILITY_MARGIN:
        verdict = "unstable"
    else:
        verdict = "marginal"
    order = sorted(range(len(eigs)), key=lambda i: (eigs[i].real, eigs[i].imag))
    return StabilityReport(
        point=fp,
        eigenvalues=tuple(complex(eigs[i]) for i in order),
        spectral_radius=rho,
        verdict=verdict,
    )


def diagonal_fixed_points(eq: DifferenceEquation) -> list:
    """FixedPoint objects for the diagonal equilibria of an equation."""
    out = []
    for root in diagonal_equilibria(eq):
        k = eq.order
        exact = (root.exact_value,) * k if root.exact_value is not None else None
        out.append(
            FixedPoint(
                coords=(root.value,) * k,
                positive=root.positive,
                exact_witness=root,
                exact_coords=exact,
            )
        )
    return out
