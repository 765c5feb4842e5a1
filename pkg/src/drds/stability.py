"""Global asymptotic stability: conjecture numerically, certify by contraction.

The certificate is a pair (r, alpha > 1) with
alpha * |T^r(x) - xbar|^2 <= |x - xbar|^2 on the positive orthant, which
forces every orbit's squared distance to the fixed point down by 1/alpha
each r steps.  Clearing denominators turns the inequality into positivity
of one polynomial over a perfect-square denominator; the rigorous prover
needs an exactly rational fixed point (with any other center the cleared
polynomial is genuinely negative near the true equilibrium), while the
semi-rigorous prover tolerates a high-precision rational stand-in.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .equilibria import (diagonal_equilibria, exact_rational_fixed_point, local_stability,
                         positive_fixed_points, refine_diagonal_root, FixedPoint)
from .errors import DivisionByZero, NoStableFixedPoint, NotPerfectSquare, Overflow
from .poly import Polynomial, RationalFunction
from .positivity import (PositivityResult, prove_positive_on_orthant,
                         DEFAULT_BOX_BUDGET)
from .sampling import eval_poly_batch, log_uniform_points, nelder_mead_positive, poly_float_arrays
from .systems import DifferenceEquation, Transformation, companion_map

DEFAULT_ALPHA = Fraction(101, 100)
HIGH_PRECISION = Fraction(1, 10**60)
PREFILTER_SEGMENTS = 200


def conjecture_global(tr: Transformation, K1: int = 1000, K2: int = 20, seed: int = 0):
    """Empirical global-limit scan: K2 random positive orbits of length K1.

    Returns the common limit point when every orbit settles (last two states
    within 1e-9) and all the limits agree pairwise to 1e-6; None otherwise.
    Orbit failures (overflow, division) count as disagreement.
    """
    if K1 < 2 or K2 < 1:
        raise ValueError("need K1 >= 2 and K2 >= 1")
    rng = np.random.default_rng(seed)
    evs = [c.float_evaluator() for c in tr.components]
    limits = []
    for start in log_uniform_points(rng, tr.dim, K2):
        state = list(start)
        prev = None
        try:
            for _ in range(K1):
                prev = state
                state = [ev(state) for ev in evs]
                if any(not math.isfinite(v) or abs(v) > 1e300 for v in state):
                    return None
        except (DivisionByZero, Overflow, ZeroDivisionError, OverflowError):
            return None
        if max(abs(a - b) for a, b in zip(state, prev)) > 1e-9:
            return None
        limits.append(state)
    first = limits[0]
    for other in limits[1:]:
        if max(abs(a - b) for a, b in zip(first, other)) > 1e-6:
            return None
    k = tr.dim
    return tuple(sum(lim[i] for lim in limits) / len(limits) for i in range(k))


@dataclass
class ContractionObjective:
    """Cleared numerator of |x - xbar|^2 - alpha |T^r(x) - xbar|^2."""

    r: int
    alpha: Fraction
    fixed_point: tuple
    numerator: Polynomial
    denominator_root: Polynomial
    map: Transformation


def build_objective(tr: Transformation, fp, r: int,
                    alpha: Fraction = DEFAULT_ALPHA) -> ContractionObjective:
    """Compose the map r times and clear denominators of the contraction gap.

    The cleared denominator is (prod of component denominators)^2, a perfect
    square by construction; the identity is still verified and a failure
    raises NotPerfectSquare (it would signal an implementation bug).
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if tr.parameters:
        raise ValueError("instantiate parameters before building objectives")
    alpha = Fraction(alpha)
    fp = tuple(Fraction(c) for c in fp)
    # working-precision fixed-point sanity check
    image = tr.apply_float([float(c) for c in fp])
    if max(abs(a - float(b)) for a, b in zip(image, fp)) > 1e-6:
        raise ValueError("candidate point is not a fixed point to working precision")

    Tr = tr.iterate(r)
    dens = [c.den for c in Tr.components]
    k = tr.dim
    # prefix/suffix products for prod_{j != i} den_j
    prefix = [Polynomial.constant(dens[0].context, 1)]
    for d in dens:
        prefix.append(prefix[-1] * d)
    suffix = [Polynomial.constant(dens[0].context, 1)]
    for d in reversed(dens):
        suffix.append(suffix[-1] * d)
    suffix.reverse()
    D = prefix[-1]

    ctx = Tr.components[0].context
    dist = Polynomial.zero(ctx)
    for v, c in zip(tr.variables, fp):
        term = Polynomial.variable(ctx, v) - Polynomial.constant(ctx, c)
        dist = dist + term * term

    pulled = Polynomial.zero(ctx)
    for i, comp in enumerate(Tr.components):
        g = (comp.num - comp.den * fp[i]) * (prefix[i] * suffix[i + 1])
        pulled = pulled + g * g
    numerator = dist * (D * D) - pulled * alpha

    cleared_denominator = D * D
    if not (D * D) == cleared_denominator:
        raise NotPerfectSquare("cleared denominator is not the square of its root")
    return ContractionObjective(
        r=r, alpha=alpha, fixed_point=fp, numerator=numerator,
        denominator_root=D, map=tr,
    )


def prove_positive_rigorous(obj: ContractionObjective,
                            box_budget: int = DEFAULT_BOX_BUDGET,
                            seed: int = 20250810) -> PositivityResult:
    """Rigorous two-phase positivity proof of the objective numerator."""
    return prove_positive_on_orthant(obj.numerator, obj.fixed_point,
                                     box_budget=box_budget, seed=seed)


@dataclass
class SamplingEvidence:
    evidence: bool
    samples: int
    starts: int
    epsilon: float
    scale: float
    worst_value: float
    worst_point: tuple
    minima: list
    seed: int


def prove_positive_semirigorous(obj: ContractionObjective, samples: int = 10_000,
                                starts: int = 30, epsilon: float = 1e-6,
                                seed: int = 20250810) -> SamplingEvidence:
    """Sampling + multistart simplex descent on the objective numerator.

    Evidence iff every sampled value and local minimum is >= -epsilon*scale,
    where scale is the median |value| over the random samples.
    """
    if samples < 1 or starts < 1:
        raise ValueError("samples and starts must be >= 1")
    rng = np.random.default_rng(seed)
    k = obj.map.dim
    coeffs, expo = poly_float_arrays(obj.numerator)
    pts = log_uniform_points(rng, k, samples)
    values = eval_poly_batch(coeffs, expo, pts)
    scale = float(np.median(np.abs(values))) if len(values) else 0.0
    threshold = -epsilon * scale

    def exact_confirm(point, value):
        # float evaluation of a hugely cancelling polynomial can report
        # garbage of either sign; candidate violations are re-checked exactly
        if value >= threshold:
            return value
        exact = obj.numerator.evaluate_exact(tuple(Fraction(v) for v in point))
        return float(exact)

    # exact-confirm sampled float violations, worst first; the first genuine
    # violation decides, otherwise the smallest credible value is kept
    worst_value, worst_point = 0.0, ()
    if len(values):
        best = None
        for i in np.argsort(values):
            v = float(values[i])
            if v >= threshold:
                if best is None or v < best[0]:
                    best = (v, i)
                break
            exact = exact_confirm(pts[i], v)
            if best is None or exact < best[0]:
                best = (exact, i)
            if exact < threshold:
                break
        worst_value = best[0]
        worst_point = tuple(float(x) for x in pts[best[1]])

    ev = obj.numerator.float_evaluator()
    minima = []
    for start in log_uniform_points(rng, k, starts):
        point, value, _ = nelder_mead_positive(lambda x: ev(list(x)), start)
        value = exact_confirm(point, value)
        minima.append(value)
        if value < worst_value:
            worst_value = value
            worst_point = tuple(float(v) for v in point)

    return SamplingEvidence(
        evidence=bool(worst_value >= threshold),
        samples=samples, starts=starts, epsilon=epsilon, scale=scale,
        worst_value=worst_value, worst_point=worst_point, minima=minima, seed=seed,
    )


@dataclass
class Certificate:
    """Machine-checkable outcome of the global-stability driver."""

    kind: str                  # rigorous | semi_rigorous
    verdict: str               # proved | evidence | fail
    alpha: Fraction
    r: int | None
    fixed_point: tuple | None
    fixed_point_exact: tuple | None
    evidence: object = None    # PositivityResult or SamplingEvidence for the certified r
    attempts: list = field(default_factory=list)   # per-r prefilter/prover trail
    seed: int = 0
    max_r: int = 0
    notes: str = ""
    system_text: str = ""

    def to_dict(self):
        from .report import jsonable

        return jsonable(self)

    def theorem_text(self) -> str:
        if self.verdict in ("proved", "evidence"):
            strength = "Theorem" if self.verdict == "proved" else "Semi-rigorous theorem"
            how = ("a rigorous interval-arithmetic proof"
                   if self.verdict == "proved" else "sampling and multistart minimization evidence")
            fp = ", ".join(f"{float(c):.10g}" for c in self.fixed_point)
            return (
                f"{strength}. Every orbit of the system [{self.system_text}] starting from "
                f"positive values converges to the unique positive equilibrium ({fp}). "
                f"Proof: with r = {self.r} and alpha = {self.alpha}, the inequality "
                f"alpha*|T^r(x) - xbar|^2 <= |x - xbar|^2 holds on the positive orthant, "
                f"established by {how}; the squared distance to the equilibrium therefore "
                f"shrinks by the factor {1 / float(self.alpha):.6f} every {self.r} step(s). QED"
            )
        return (
            f"FAIL. No contraction certificate with alpha = {self.alpha} was found for "
            f"r = 1..{self.max_r} for the system [{self.system_text}]; this neither proves "
            f"nor disproves global stability."
        )


def _prefilter(tr: Transformation, fp_float, r: int, alpha: float, seed: int,
               segments: int = PREFILTER_SEGMENTS) -> bool:
    """Quick numeric screen: contraction on random orbit segments."""
    rng = np.random.default_rng(seed ^ (r * 0x9E3779B9))
    evs = [c.float_evaluator() for c in tr.components]
    pts = log_uniform_points(rng, tr.dim, segments)
    for p in pts:
        x = list(p)
        d0 = sum((a - b) ** 2 for a, b in zip(x, fp_float))
        try:
            for _ in range(r):
                x = [ev(x) for ev in evs]
        except (DivisionByZero, ZeroDivisionError, OverflowError):
            return False
        d1 = sum((a - b) ** 2 for a, b in zip(x, fp_float))
        if alpha * d1 > d0 * (1.0 + 1e-12):
            return False
    return True


def _locate_fixed_point(system, seed):
    """Unique positive fixed point with exact data when available.

    Returns (map, FixedPoint, exact_coords or None, high_precision_coords).
    Raises NoStableFixedPoint for zero/multiple positive points or a
    strictly unstable one; marginal points pass through (the r-search will
    simply fail for them).
    """
    if isinstance(system, DifferenceEquation):
        if system.parameters:
            raise ValueError("instantiate parameters first")
        tr = companion_map(system)
        roots = [root for root in diagonal_equilibria(system) if root.positive]
        if len(roots) != 1:
            raise NoStableFixedPoint(
                f"expected exactly one positive equilibrium, found {len(roots)}"
            )
        root = roots[0]
        k = system.order
        exact = (root.exact_value,) * k if root.exact_value is not None else None
        precise = (refine_diagonal_root(system, root, HIGH_PRECISION),) * k
        fp = FixedPoint(coords=(root.value,) * k, positive=True,
                        exact_witness=root, exact_coords=exact)
    else:
        tr = system
        if tr.parameters:
            raise ValueError("instantiate parameters first")
        points = positive_fixed_points(tr, attempts=200, seed=seed)
        if len(points) != 1:
            raise NoStableFixedPoint(
                f"expected exactly one positive fixed point, found {len(points)}"
            )
        fp = points[0]
        exact = exact_rational_fixed_point(tr, fp.coords)
        precise = exact if exact is not None else _refine_map_fixed_point(tr, fp.coords)

    report = local_stability(tr, fp)
    if report.verdict == "unstable":
        raise NoStableFixedPoint(
            f"the unique positive fixed point is locally unstable "
            f"(spectral radius {report.spectral_radius:.6g})"
        )
    return tr, fp, exact, precise


def _refine_map_fixed_point(tr: Transformation, approx, target: Fraction = HIGH_PRECISION):
    """Newton refinement of a fixed point in exact rational arithmetic.

    The Jacobian inverse is computed in floats (it only steers the
    iteration); residuals are exact, giving quadratic convergence to far
    below float precision.
    """
    g = []
    for var, comp in zip(tr.variables, tr.components):
        xi = Polynomial.variable(comp.context, var)
        g.append(comp.num - xi * comp.den)
    jac = [[gi.differentiate(v) for v in tr.variables] for gi in g]
    x = [Fraction(float(c)).limit_denominator(10**15) for c in approx]
    for _ in range(8):
        xf = [float(c) for c in x]
        J = np.array([[e.evaluate_float(xf) for e in row] for row in jac])
        try:
            Jinv = np.linalg.inv(J)
        except np.linalg.LinAlgError:
            break
        residual = [gi.evaluate_exact(x) for gi in g]
        if all(abs(rv) < target for rv in residual):
            break
        Jinv_frac = [[Fraction(float(v)).limit_denominator(10**17) for v in row] for row in Jinv]
        step = [sum(Jinv_frac[i][j] * residual[j] for j in range(len(x))) for i in range(len(x))]
        x = [xi - si for xi, si in zip(x, step)]
        # keep denominators from snowballing between iterations
        x = [xi.limit_denominator(10**80) for xi in x]
    return tuple(x)


def prove_global_stability(system, maxR: int = 6, mode: str = "semi",
                           alpha: Fraction = DEFAULT_ALPHA, seed: int = 20250810,
                           samples: int = 10_000, starts: int = 30,
                           epsilon: float = 1e-6,
                           box_budget: int = DEFAULT_BOX_BUDGET) -> Certificate:
    """Search r = 1..maxR for a contraction certificate at the given alpha.

    Each r is screened by a numeric prefilter (contraction on random orbit
    segments) before the exact objective is built and handed to the
    selected prover.  Returns the first certified r, or a FAIL certificate.
    """
    if maxR < 1:
        raise ValueError("maxR must be >= 1")
    if mode not in ("rigorous", "semi"):
        raise ValueError("mode must be 'rigorous' or 'semi'")
    alpha = Fraction(alpha)
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")

    tr, fp, exact, precise = _locate_fixed_point(system, seed)
    system_text = str(system)
    fp_float = fp.as_floats()
    kind = "rigorous" if mode == "rigorous" else "semi_rigorous"

    if mode == "rigorous" and exact is None:
        return Certificate(
            kind=kind, verdict="fail", alpha=alpha, r=None,
            fixed_point=tuple(fp_float), fixed_point_exact=None,
            seed=seed, max_r=maxR, system_text=system_text,
            notes=(
                "the unique positive equilibrium is not an exact rational point; "
                "a rigorous contraction certificate centered at any rational "
                "approximation is genuinely false near the true equilibrium, "
                "so only the semi-rigorous prover applies"
            ),
        )

    center = exact if exact is not None else precise
    attempts = []
    for r in range(1, maxR + 1):
        if not _prefilter(tr, fp_float, r, float(alpha), seed):
            attempts.append({"r": r, "stage": "prefilter", "outcome": "contraction violated"})
            continue
        obj = build_objective(tr, center, r, alpha)
        if mode == "rigorous":
            result = prove_positive_rigorous(obj, box_budget=box_budget, seed=seed)
            attempts.append({"r": r, "stage": "rigorous", "outcome": result.status,
                             "boxes": result.boxes_processed, "detail": result.detail})
            if result.status == "proved":
                return Certificate(
                    kind=kind, verdict="proved", alpha=alpha, r=r,
                    fixed_point=tuple(fp_float), fixed_point_exact=exact,
                    evidence=result, attempts=attempts, seed=seed, max_r=maxR,
                    system_text=system_text,
                )
        else:
            result = prove_positive_semirigorous(obj, samples=samples, starts=starts,
                                                 epsilon=epsilon, seed=seed)
            attempts.append({"r": r, "stage": "semi_rigorous",
                             "outcome": "evidence" if result.evidence else "negative value",
                             "worst_value": result.worst_value})
            if result.evidence:
                return Certificate(
                    kind=kind, verdict="evidence", alpha=alpha, r=r,
                    fixed_point=tuple(fp_float), fixed_point_exact=exact,
                    evidence=result, attempts=attempts, seed=seed, max_r=maxR,
                    system_text=system_text,
                )
    return Certificate(
        kind=kind, verdict="fail", alpha=alpha, r=None,
        fixed_point=tuple(fp_float), fixed_point_exact=exact,
        attempts=attempts, seed=seed, max_r=maxR, system_text=system_text,
    )
