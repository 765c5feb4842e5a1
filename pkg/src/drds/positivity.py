"""Rigorous positivity certificates for polynomials on the positive orthant.

Two certificate shapes are produced:

* interior-zero certificates ("ball + charts"): the polynomial vanishes at
  a single known interior rational point.  Phase 1 certifies strict
  positivity on a punctured box around the zero: the value and gradient
  vanish there exactly (checked in rational arithmetic) and the interval
  Hessian over the box is proven positive definite (Gershgorin, falling
  back to interval LDL^T elimination), so the Taylor form is positive.
  Phase 2 covers the rest of the closed orthant *including infinity* by
  homogenizing to degree d and running interval branch-and-bound over the
  k+1 projective chart cubes {u_i = 1} in [0,1]^k, excising boxes whose
  chart image provably lies inside the Phase-1 box.  Every box has exact
  dyadic endpoints, so coverage is replayable bit for bit.

* plane-factorization certificates: the polynomial equals L^m * Q with L
  linear, m even, and Q a polynomial with all-positive coefficients; this
  proves non-negativity with zero set exactly {L = 0} on the open orthant
  and is checked by exact division and a coefficient sign scan.

Proofs are self-contained and re-checkable by an independently coded
interval evaluator (mpmath's arbitrary-precision intervals).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DrdsError
from .gcdtools import exact_divide
from .interval import Interval
from .poly import Polynomial

DEFAULT_BOX_BUDGET = 1_000_000
RHO_START = Fraction(1, 128)          # largest power of 1/2 <= 1e-2
RHO_RETRIES = 10
MIN_BOX_WIDTH = Fraction(1, 2**60)


# --- interval helpers -------------------------------------------------------


def box_to_intervals(box) -> list:
    """Outward float64 enclosures of a rational box."""
    out = []
    for lo, hi in box:
        a = Interval.from_fraction(lo)
        b = Interval.from_fraction(hi)
        out.append(Interval(a.lo, b.hi))
    return out


def poly_lower_bound(poly: Polynomial, box) -> float:
    return poly.evaluate_interval(box_to_intervals(box)).lo


def gradient(poly: Polynomial) -> list:
    return [poly.differentiate(v) for v in poly.context]


def hessian(poly: Polynomial) -> list:
    grads = gradient(poly)
    return [[g.differentiate(v) for v in poly.context] for g in grads]


def interval_matrix(entries, box) -> list:
    ivbox = box_to_intervals(box)
    return [[e.evaluate_interval(ivbox) for e in row] for row in entries]


def gershgorin_positive_definite(H) -> bool:
    """Strict row diagonal dominance with positive diagonal."""
    n = len(H)
    for i in range(n):
        radius = sum(H[i][j].mag for j in range(n) if j != i)
        if not H[i][i].lo > radius:
            return False
    return True


def ldlt_positive_definite(H) -> bool:
    """Interval LDL^T elimination; positive pivot enclosures prove that every
    symmetric matrix in the interval family is positive definite."""
    n = len(H)
    A = [[H[i][j] for j in range(n)] for i in range(n)]
    for j in range(n):
        pivot = A[j][j]
        if not pivot.lo > 0.0:
            return False
        for i in range(j + 1, n):
            try:
                f = A[i][j] / pivot
            except ZeroDivisionError:
                return False
            for l in range(j, n):
                A[i][l] = A[i][l] - f * A[j][l]
    return True


# --- proof data -------------------------------------------------------------


@dataclass(frozen=True)
class BallCertificate:
    center: tuple
    rho: Fraction
    pd_method: str

    def box(self):
        return [(c - self.rho, c + self.rho) for c in self.center]


@dataclass(frozen=True)
class ChartLeaf:
    box: tuple          # ((lo, hi) Fractions per chart coordinate)
    status: str         # "positive" | "excised"
    lower_bound: float = 0.0


@dataclass
class InteriorZeroProof:
    kind: str
    polynomial: Polynomial
    zero_point: tuple
    ball: BallCertificate
    chart_leaves: dict      # chart index -> list[ChartLeaf]
    boxes_processed: int


@dataclass
class PlaneFactorizationProof:
    kind: str
    polynomial: Polynomial
    plane: Polynomial
    multiplicity: int
    cofactor: Polynomial


@dataclass
class PositivityResult:
    status: str             # proved | refuted | unknown
    proof: object = None
    witness: tuple = None   # exact rational point with negative value, if refuted
    witness_value: Fraction = None
    detail: str = ""
    boxes_processed: int = 0


# --- refutation sampling ------------------------------------------------------


def _refutation_scan(poly: Polynomial, seed: int, count: int = 1000):
    """Look for a provably negative value at exact dyadic sample points."""
    rng = random.Random(seed)
    k = len(poly.context)
    ev = poly.float_evaluator()
    for _ in range(count):
        pt = [10.0 ** rng.uniform(-2.0, 2.0) for _ in range(k)]
        if ev(pt) < 0.0:
            exact_pt = tuple(Fraction(x) for x in pt)
            value = poly.evaluate_exact(exact_pt)
            if value < 0:
                return exact_pt, value
    return None


# --- phase 1 ------------------------------------------------------------------


def ball_certificate(poly: Polynomial, center, rho_start: Fraction = RHO_START,
                     retries: int = RHO_RETRIES):
    """Certify strict positivity on a punctured box around an exact zero.

    Requires the value and gradient to vanish exactly at the center; the
    interval Hessian over [center +- rho] must be provably positive
    definite.  rho starts at the largest power of 1/2 below 1e-2 and is
    halved on failure.
    """
    center = tuple(Fraction(c) for c in center)
    if poly.evaluate_exact(center) != 0:
        return None, "polynomial does not vanish exactly at the candidate point"
    for g in gradient(poly):
        if g.evaluate_exact(center) != 0:
            return None, "gradient does not vanish exactly at the candidate point"
    H = hessian(poly)
    rho = rho_start
    for _ in range(retries + 1):
        box = [(c - rho, c + rho) for c in center]
        HI = interval_matrix(H, box)
        if gershgorin_positive_definite(HI):
            return BallCertificate(center, rho, "gershgorin"), ""
        if ldlt_positive_definite(HI):
            return BallCertificate(center, rho, "ldlt"), ""
        rho = rho / 2
    return None, "interval Hessian not provably positive definite down to the smallest radius"


# --- phase 2: projective charts --------------------------------------------------


def homogenize(poly: Polynomial, aux: str = "u0") -> Polynomial:
    d = poly.total_degree()
    ctx = (aux,) + poly.context
    terms = {}
    for m, c in poly.terms.items():
        terms[(d - sum(m),) + m] = c
    return Polynomial(ctx, terms)


def chart_polynomials(poly: Polynomial):
    """The k+1 restrictions of the homogenization to the faces u_i = 1.

    Chart 0 is the polynomial itself on [0,1]^k; chart i >= 1 sets x_i = 1
    and keeps (u0, other variables) in [0,1]^k.
    """
    hom = homogenize(poly)
    charts = {0: hom.substitute_values({"u0": 1})}
    for i, v in enumerate(poly.context, start=1):
        charts[i] = hom.substitute_values({v: 1})
    return charts


def chart_image_inside(chart: int, box, excision_box) -> bool:
    """Conservative test: does this chart box map inside the excision box?

    Chart 0 coordinates are the state itself; chart i coordinates are
    (u0, x_j for j != i) with x_i = 1/u0 and x_j = u_j/u0.  All arithmetic
    is exact on Fractions.
    """
    if chart == 0:
        return all(blo >= elo and bhi <= ehi
                   for (blo, bhi), (elo, ehi) in zip(box, excision_box))
    u0lo, u0hi = box[0]
    if u0lo <= 0:
        return False
    k = len(excision_box)
    # x_i range
    ilo, ihi = Fraction(1) / u0hi, Fraction(1) / u0lo
    elo, ehi = excision_box[chart - 1]
    if not (ilo >= elo and ihi <= ehi):
        return False
    others = [j for j in range(k) if j != chart - 1]
    for pos, j in enumerate(others, start=1):
        ulo, uhi = box[pos]
        xlo, xhi = ulo / u0hi, uhi / u0lo
        elo, ehi = excision_box[j]
        if not (xlo >= elo and xhi <= ehi):
            return False
    return True


def _split_axis(box) -> int:
    widths = [hi - lo for lo, hi in box]
    best = 0
    for i, w in enumerate(widths):
        if w > widths[best]:
            best = i
    return best


class ChartBounder:
    """Rigorous lower bounds for one chart polynomial over rational boxes.

    Uses the better of the direct monomial-wise interval evaluation and the
    mean-value (centered) form value(mid) + grad(box).(box - mid); the
    centered form converges quadratically in the box width and is what makes
    subdivision near the excision shell terminate.
    """

    def __init__(self, poly: Polynomial):
        self.poly = poly
        self.grads = gradient(poly)

    def lower_bound(self, box) -> float:
        ivbox = box_to_intervals(box)
        direct = self.poly.evaluate_interval(ivbox).lo
        mid = [(lo + hi) / 2 for lo, hi in box]
        midbox = [Interval.from_fraction(m) for m in mid]
        centered = self.poly.evaluate_interval(midbox)
        for g, x, m in zip(self.grads, ivbox, midbox):
            centered = centered + g.evaluate_interval(ivbox) * (x - m)
        return max(direct, centered.lo)


def branch_and_bound_chart(chart_poly: Polynomial, chart: int, excision_box,
                           budget: int, collect_leaves: bool = True):
    """Prove the chart polynomial positive on [0,1]^dim minus the excised
    image.  Returns (leaves or None, boxes_processed, failure_box or None)."""
    dim = len(chart_poly.context)
    unit = tuple((Fraction(0), Fraction(1)) for _ in range(dim))
    bounder = ChartBounder(chart_poly)
    stack = [unit]
    leaves = [] if collect_leaves else None
    processed = 0
    while stack:
        if processed >= budget:
            return None, processed, stack[-1]
        box = stack.pop()
        processed += 1
        if excision_box is not None and chart_image_inside(chart, box, excision_box):
            if collect_leaves:
                leaves.append(ChartLeaf(box=tuple(box), status="excised"))
            continue
        lb = bounder.lower_bound(box)
        if lb > 0.0:
            if collect_leaves:
                leaves.append(ChartLeaf(box=tuple(box), status="positive", lower_bound=lb))
            continue
        axis = _split_axis(box)
        lo, hi = box[axis]
        if hi - lo <= MIN_BOX_WIDTH:
            return None, processed, box
        mid = (lo + hi) / 2
        left = tuple(b if i != axis else (b[0], mid) for i, b in enumerate(box))
        right = tuple(b if i != axis else (mid, b[1]) for i, b in enumerate(box))
        stack.append(right)
        stack.append(left)
    return leaves, processed, None


def prove_positive_on_orthant(poly: Polynomial, zero_point,
                              box_budget: int = DEFAULT_BOX_BUDGET,
                              seed: int = 20250810) -> PositivityResult:
    """Prove poly >= 0 on (0, inf)^k with equality only at zero_point.

    Returns proved (with a replayable InteriorZeroProof), refuted (with an
    exact negative witness) or unknown (budget/boundary obstruction).
    """
    neg = _refutation_scan(poly, seed)
    if neg is not None:
        return PositivityResult(status="refuted", witness=neg[0], witness_value=neg[1],
                                detail="negative value at an exact sample point")

    ball, why = ball_certificate(poly, zero_point)
    if ball is None:
        return PositivityResult(status="unknown", detail=f"phase 1 failed: {why}")

    excision = ball.box()
    charts = chart_polynomials(poly)
    all_leaves = {}
    total = 0
    for chart, cpoly in charts.items():
        leaves, processed, bad = branch_and_bound_chart(
            cpoly, chart, excision, box_budget - total
        )
        total += processed
        if leaves is None:
            where = "budget exhausted" if total >= box_budget else f"stuck near box {bad}"
            return PositivityResult(
                status="unknown",
                detail=f"phase 2 chart {chart}: {where} "
                       f"(a boundary zero of the homogenization cannot be excluded)",
                boxes_processed=total,
            )
        all_leaves[chart] = leaves
    proof = InteriorZeroProof(
        kind="interior_zero_ball_and_charts",
        polynomial=poly,
        zero_point=tuple(Fraction(c) for c in zero_point),
        ball=ball,
        chart_leaves=all_leaves,
        boxes_processed=total,
    )
    return PositivityResult(status="proved", proof=proof, boxes_processed=total)


# --- plane factorization certificates ----------------------------------------------


def plane_factorization_certificate(poly: Polynomial, plane: Polynomial):
    """Certify poly = plane^m * Q with m even and Q positive-coefficient.

    Proves poly >= 0 on the closed orthant with open-orthant zero set
    exactly {plane = 0}; returns None when the structure is absent.
    """
    if plane.total_degree() != 1:
        raise ValueError("the factor must be linear")
    remaining = poly
    multiplicity = 0
    while True:
        q = exact_divide(remaining, plane)
        if q is None:
            break
        remaining = q
        multiplicity += 1
    if multiplicity == 0 or multiplicity % 2 != 0:
        return None
    if remaining.is_zero() or any(c <= 0 for c in remaining.terms.values()):
        return None
    return PlaneFactorizationProof(
        kind="plane_square_times_positive",
        polynomial=poly,
        plane=plane,
        multiplicity=multiplicity,
        cofactor=remaining,
    )


# --- replay ---------------------------------------------------------------------


class MpmathIntervalEvaluator:
    """Independent interval evaluator backed by mpmath's iv context."""

    def __init__(self, precision_bits: int = 80):
        from mpmath import iv

        self.iv = iv
        self.prec = precision_bits

    def _from_fraction(self, q: Fraction):
        iv = self.iv
        iv.prec = self.prec
        return iv.mpf(q.numerator) / iv.mpf(q.denominator)

    def interval_from_box(self, lo: Fraction, hi: Fraction):
        iv = self.iv
        iv.prec = self.prec
        a = self._from_fraction(lo)
        b = self._from_fraction(hi)
        return iv.mpf([a.a, b.b])

    def eval_poly(self, poly: Polynomial, box):
        iv = self.iv
        iv.prec = self.prec
        point = [self.interval_from_box(lo, hi) for lo, hi in box]
        total = iv.mpf(0)
        for m, c in poly.terms.items():
            term = self._from_fraction(c)
            for x, e in zip(point, m):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def lower_bound(self, poly: Polynomial, box) -> float:
        return float(self.eval_poly(poly, box).a)

    def lower_bound_centered(self, poly: Polynomial, grads, box) -> float:
        """Best of direct evaluation and the mean-value form, independently
        re-derived in mpmath interval arithmetic."""
        direct = self.eval_poly(poly, box)
        mid = [((lo + hi) / 2, (lo + hi) / 2) for lo, hi in box]
        centered = self.eval_poly(poly, mid)
        for g, (lo, hi), (m, _) in zip(grads, box, mid):
            gv = self.eval_poly(g, box)
            dx = self.interval_from_box(lo - m, hi - m)
            centered = centered + gv * dx
        return max(float(direct.a), float(centered.a))

    def matrix_lower_pd(self, entries, box) -> bool:
        """Gershgorin in mpmath interval arithmetic."""
        mats = [[self.eval_poly(e, box) for e in row] for row in entries]
        n = len(mats)
        for i in range(n):
            radius = sum(
                max(abs(float(mats[i][j].a)), abs(float(mats[i][j].b)))
                for j in range(n) if j != i
            )
            if not float(mats[i][i].a) > radius:
                return False
        return True


def replay_interior_zero_proof(proof: InteriorZeroProof, evaluator=None) -> bool:
    """Re-check every leaf and the ball certificate with an independently
    coded interval evaluator; also re-verifies exact zero/gradient conditions
    and that the leaves exactly tile each chart cube."""
    ev = evaluator or MpmathIntervalEvaluator()
    poly = proof.polynomial
    center = proof.zero_point

    if poly.evaluate_exact(center) != 0:
        return False
    if any(g.evaluate_exact(center) != 0 for g in gradient(poly)):
        return False

    H = hessian(poly)
    ball_box = proof.ball.box()
    if not (ev.matrix_lower_pd(H, ball_box) or ldlt_positive_definite(interval_matrix(H, ball_box))):
        return False

    charts = chart_polynomials(poly)
    excision = ball_box
    for chart, leaves in proof.chart_leaves.items():
        cpoly = charts[chart]
        cgrads = gradient(cpoly)
        lookup = {}
        for leaf in leaves:
            lookup[leaf.box] = leaf
            if leaf.status == "positive":
                if not ev.lower_bound_centered(cpoly, cgrads, leaf.box) > 0.0:
                    return False
            elif leaf.status == "excised":
                if not chart_image_inside(chart, leaf.box, excision):
                    return False
            else:
                return False
        dim = len(cpoly.context)
        unit = tuple((Fraction(0), Fraction(1)) for _ in range(dim))
        stack = [unit]
        seen = 0
        while stack:
            box = stack.pop()
            if box in lookup:
                seen += 1
                continue
            axis = _split_axis(box)
            lo, hi = box[axis]
            if hi - lo <= MIN_BOX_WIDTH:
                return False
            mid = (lo + hi) / 2
            left = tuple(b if i != axis else (b[0], mid) for i, b in enumerate(box))
            right = tuple(b if i != axis else (mid, b[1]) for i, b in enumerate(box))
            stack.extend((right, left))
        if seen != len(leaves):
            return False
    return True


def replay_plane_factorization(proof: PlaneFactorizationProof, seed: int = 7,
                               spot_checks: int = 50) -> bool:
    """Exact re-verification: identity at random rational points, even
    multiplicity, and positive cofactor coefficients."""
    if proof.multiplicity % 2 != 0 or proof.multiplicity <= 0:
        return False
    if any(c <= 0 for c in proof.cofactor.terms.values()):
        return False
    rng = random.Random(seed)
    k = len(proof.polynomial.context)
    for _ in range(spot_checks):
        pt = tuple(Fraction(rng.randint(1, 400), rng.randint(1, 40)) for _ in range(k))
        lhs = proof.polynomial.evaluate_exact(pt)
        rhs = (proof.plane.evaluate_exact(pt) ** proof.multiplicity) * proof.cofactor.evaluate_exact(pt)
        if lhs != rhs:
            return False
    # full identity, not only spot checks
    reconstructed = (proof.plane ** proof.multiplicity) * proof.cofactor
    return reconstructed == proof.polynomial
