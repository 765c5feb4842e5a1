"""Difference equations, transformations of the positive orthant, orbits.

A k-th order rational difference equation x_{n+1} = F(x_n, ..., x_{n-k+1})
and its companion first-order map on (0,inf)^k are two views of the same
system; certificates operate on maps while users mostly write equations,
so the conversion is explicit rather than hidden.  Orbits run in exact,
float64 or symbolic arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DivisionByZero, ExpressionTooLarge, Overflow
from .parsing import format_equation, format_map, lag_variable_names
from .poly import Polynomial, RationalFunction, monomials_up_to_degree

FLOAT_MAG_MAX = 1e300
FLOAT_MAG_MIN = 1e-300
DEFAULT_TERM_BUDGET = 100_000


@dataclass(frozen=True)
class DifferenceEquation:
    """x_{n+1} = rhs(x_n, x_{n-1}, ..., x_{n-k+1}); rhs may carry parameters."""

    order: int
    rhs: RationalFunction
    parameters: tuple = ()

    def __post_init__(self):
        lag_names = lag_variable_names(self.order)
        expected = lag_names + tuple(self.parameters)
        if self.rhs.context != expected:
            raise ValueError(
                f"rhs context {self.rhs.context} does not match lags+parameters {expected}"
            )

    @property
    def lag_names(self):
        return lag_variable_names(self.order)

    def instantiate(self, values) -> "DifferenceEquation":
        """Substitute exact rational values for (some) parameters."""
        missing = [p for p in self.parameters if p not in values]
        rhs = self.rhs.substitute_values({p: Fraction(values[p]) for p in self.parameters if p in values})
        return DifferenceEquation(order=self.order, rhs=rhs, parameters=tuple(missing))

    def __str__(self):
        return format_equation(self)


@dataclass(frozen=True)
class Transformation:
    """Rational self-map of (0,inf)^k given componentwise."""

    dim: int
    components: tuple
    variables: tuple
    parameters: tuple = ()

    def __init__(self, dim, components, variables=None, parameters=()):
        components = tuple(components)
        if variables is None:
            variables = tuple(f"x{i}" for i in range(1, dim + 1))
        variables = tuple(variables)
        parameters = tuple(parameters)
        if len(components) != dim or len(variables) != dim:
            raise ValueError("component/variable count must equal the dimension")
        context = variables + parameters
        for c in components:
            if c.context != context:
                raise ValueError("all components must share one variable context")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "parameters", parameters)

    @property
    def context(self):
        return self.variables + self.parameters

    def instantiate(self, values) -> "Transformation":
        vals = {p: Fraction(values[p]) for p in self.parameters if p in values}
        missing = tuple(p for p in self.parameters if p not in values)
        return Transformation(
            dim=self.dim,
            components=[c.substitute_values(vals) for c in self.components],
            variables=self.variables,
            parameters=missing,
        )

    def self_substitution(self):
        """Substitution map sending each variable to the matching component."""
        subs = {v: c for v, c in zip(self.variables, self.components)}
        for p in self.parameters:
            subs[p] = RationalFunction.variable(self.context, p)
        return subs

    def compose_with(self, inner: "Transformation") -> "Transformation":
        """Components of self applied after inner (self o inner)."""
        subs = {v: c for v, c in zip(self.variables, inner.components)}
        for p in self.parameters:
            subs[p] = RationalFunction.variable(inner.components[0].context, p)
        return Transformation(
            dim=self.dim,
            components=[c.compose(subs) for c in self.components],
            variables=self.variables,
            parameters=self.parameters,
        )

    def iterate(self, r: int) -> "Transformation":
        """Exact r-fold composition with itself."""
        if r < 1:
            raise ValueError("iteration count must be >= 1")
        result = self
        for _ in range(r - 1):
            result = self.compose_with(result)
        return result

    def apply_float(self, point):
        return [c.evaluate(list(point), mode="float") for c in self.components]

    def apply_exact(self, point):
        pt = [Fraction(x) for x in point]
        return [c.evaluate(pt, mode="exact") for c in self.components]

    def __str__(self):
        return format_map(self)


def companion_map(eq: DifferenceEquation) -> Transformation:
    """Companion transformation of a difference equation.

    Component i is x_{i+1} for i < k; component k is the right-hand side
    with x[n] -> x_k, x[n-1] -> x_{k-1}, ..., x[n-k+1] -> x_1.
    """
    k = eq.order
    variables = tuple(f"x{i}" for i in range(1, k + 1))
    context = variables + tuple(eq.parameters)
    rename = {lag: f"x{k - j}" for j, lag in enumerate(eq.lag_names)}
    last = eq.rhs.remap(context, rename)
    components = [RationalFunction.variable(context, f"x{i + 1}") for i in range(1, k)]
    components.append(last)
    return Transformation(dim=k, components=components, variables=variables, parameters=eq.parameters)


@dataclass
class Orbit:
    """Finite trajectory; equation orbits carry the scalar view as well."""

    mode: str
    order: int
    scalars: list | None = None
    map_states: list | None = None

    @property
    def states(self):
        """Map view: length N+1 list of k-dimensional states."""
        if self.map_states is not None:
            return self.map_states
        k = self.order
        return [tuple(self.scalars[i: i + k]) for i in range(len(self.scalars) - k + 1)]

    def __len__(self):
        if self.scalars is not None:
            return len(self.scalars)
        return len(self.map_states)


def _check_float(value: float, step: int) -> float:
    mag = abs(value)
    if mag > FLOAT_MAG_MAX or (value != 0.0 and mag < FLOAT_MAG_MIN):
        raise Overflow(step=step)
    return value


DEFAULT_SYMBOLS = tuple("abcdefghijklmnopqrstuvwxyz")


def orbit(system, init, N: int, mode: str = "float", symbols=None,
          term_budget: int = DEFAULT_TERM_BUDGET) -> Orbit:
    """Run the system for N extra steps from the given initial data.

    Equation orbits return N+k scalars (and expose the window view); map
    orbits return N+1 states.  Float orbits raise Overflow when any
    coordinate magnitude leaves [1e-300, 1e300]; exact and float orbits
    raise DivisionByZero with the failing step index.
    """
    if isinstance(system, DifferenceEquation):
        return _orbit_equation(system, init, N, mode, symbols, term_budget)
    if isinstance(system, Transformation):
        return _orbit_map(system, init, N, mode, symbols, term_budget)
    raise TypeError("orbit expects a DifferenceEquation or Transformation")


def _orbit_equation(eq, init, N, mode, symbols, term_budget):
    k = eq.order
    if len(init) != k:
        raise ValueError(f"initial data must have length {k}")
    if eq.parameters and mode != "symbolic":
        raise ValueError("instantiate parameters before running numeric orbits")

    if mode == "float":
        ev = eq.rhs.float_evaluator()
        scalars = [float(x) for x in init]
        for n in range(N):
            args = [scalars[-1 - j] for j in range(k)]
            try:
                value = ev(args)
            except DivisionByZero:
                raise DivisionByZero(step=n + k)
            scalars.append(_check_float(value, n + k))
        return Orbit(mode=mode, order=k, scalars=scalars)

    if mode == "exact":
        scalars = [Fraction(x) for x in init]
        for n in range(N):
            args = [scalars[-1 - j] for j in range(k)]
            try:
                value = eq.rhs.evaluate(args, mode="exact")
            except DivisionByZero:
                raise DivisionByZero(step=n + k)
            scalars.append(value)
        return Orbit(mode=mode, order=k, scalars=scalars)

    if mode == "symbolic":
        names = tuple(symbols) if symbols else DEFAULT_SYMBOLS[:k]
        if len(names) != k:
            raise ValueError("need one fresh symbol per initial value")
        context = names + tuple(eq.parameters)
        scalars = [RationalFunction.variable(context, s) for s in names]
        param_rfs = {p: RationalFunction.variable(context, p) for p in eq.parameters}
        for n in range(N):
            subs = {lag: scalars[-1 - j] for j, lag in enumerate(eq.lag_names)}
            subs.update(param_rfs)
            value = eq.rhs.compose(subs).reduced()
            if len(value.num.terms) > term_budget or len(value.den.terms) > term_budget:
                raise ExpressionTooLarge(
                    f"symbolic orbit term count exceeded budget {term_budget} at step {n + k}"
                )
            scalars.append(value)
        return Orbit(mode=mode, order=k, scalars=scalars)

    raise ValueError(f"unknown orbit mode {mode!r}")


def _orbit_map(tr, init, N, mode, symbols, term_budget):
    k = tr.dim
    if len(init) != k:
        raise ValueError(f"initial state must have length {k}")
    if tr.parameters and mode != "symbolic":
        raise ValueError("instantiate parameters before running numeric orbits")

    if mode == "float":
        evs = [c.float_evaluator() for c in tr.components]
        state = [float(x) for x in init]
        states = [tuple(state)]
        for n in range(N):
            try:
                state = [ev(state) for ev in evs]
            except DivisionByZero:
                raise DivisionByZero(step=n + 1)
            state = [_check_float(v, n + 1) for v in state]
            states.append(tuple(state))
        return Orbit(mode=mode, order=k, map_states=states)

    if mode == "exact":
        state = [Fraction(x) for x in init]
        states = [tuple(state)]
        for n in range(N):
            try:
                state = [c.evaluate(state, mode="exact") for c in tr.components]
            except DivisionByZero:
                raise DivisionByZero(step=n + 1)
            states.append(tuple(state))
        return Orbit(mode=mode, order=k, map_states=states)

    if mode == "symbolic":
        names = tuple(symbols) if symbols else DEFAULT_SYMBOLS[:k]
        context = names + tuple(tr.parameters)
        state = [RationalFunction.variable(context, s) for s in names]
        param_rfs = {p: RationalFunction.variable(context, p) for p in tr.parameters}
        states = [tuple(state)]
        for n in range(N):
            subs = {v: s for v, s in zip(tr.variables, state)}
            subs.update(param_rfs)
            state = [c.compose(subs).reduced() for c in tr.components]
            for value in state:
                if len(value.num.terms) > term_budget or len(value.den.terms) > term_budget:
                    raise ExpressionTooLarge(
                        f"symbolic orbit term count exceeded budget {term_budget} at step {n + 1}"
                    )
            states.append(tuple(state))
        return Orbit(mode=mode, order=k, map_states=states)

    raise ValueError(f"unknown orbit mode {mode!r}")


@dataclass(frozen=True)
class RandomSpec:
    """Shape of a random instance: order/dimension k, degree d, coefficient
    bound A (coefficients drawn uniformly from {1,...,A}), and a 64-bit seed."""

    k: int
    d: int
    A: int
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.d < 1 or self.A < 1:
            raise ValueError("RandomSpec requires k >= 1, d >= 1, A >= 1")


def _random_dense_rational(rng, context, nvars, degree, bound):
    monos = monomials_up_to_degree(nvars, degree)
    num = Polynomial(context, {m: rng.randint(1, bound) for m in monos})
    den = Polynomial(context, {m: rng.randint(1, bound) for m in monos})
    return RationalFunction(num, den)


def random_equation(spec: RandomSpec) -> DifferenceEquation:
    """Random equation with every monomial of total degree <= d present in
    numerator and denominator; deterministic under the seed."""
    rng = random.Random(spec.seed)
    context = lag_variable_names(spec.k)
    rhs = _random_dense_rational(rng, context, spec.k, spec.d, spec.A)
    return DifferenceEquation(order=spec.k, rhs=rhs)


def random_map(spec: RandomSpec) -> Transformation:
    """Random transformation with dense degree-<=d components; deterministic
    under the seed."""
    rng = random.Random(spec.seed)
    variables = tuple(f"x{i}" for i in range(1, spec.k + 1))
    components = [
        _random_dense_rational(rng, variables, spec.k, spec.d, spec.A)
        for _ in range(spec.k)
    ]
    return Transformation(dim=spec.k, components=components, variables=variables)


def detect_period_symbolic(eq: DifferenceEquation, maxP: int,
                           term_budget: int = DEFAULT_TERM_BUDGET):
    """Smallest p <= maxP with the symbolic state after p steps equal to the
    initial symbolic state (componentwise cross-multiplication equality),
    for generic positive initial conditions; None if there is none."""
    if maxP < 1:
        raise ValueError("maxP must be >= 1")
    k = eq.order
    ob = orbit(eq, list(range(k)), maxP, mode="symbolic", term_budget=term_budget)
    s = ob.scalars
    initial = s[:k]
    for p in range(1, maxP + 1):
        window = s[p: p + k]
        if all(a.equal(b) for a, b in zip(window, initial)):
            return p
    return None


def detect_period_numeric(eq: DifferenceEquation, init, N: int, tol: float = 1e-9):
    """Smallest p with |x_{n+p} - x_n| <= tol over the trailing 3p-window of
    a float orbit (skipping transients); None if no such p exists."""
    if N < 1:
        raise ValueError("N must be >= 1")
    ob = orbit(eq, init, N, mode="float")
    s = ob.scalars
    total = len(s)
    for p in range(1, total // 3 + 1):
        start = total - 3 * p
        if all(abs(s[i + p] - s[i]) <= tol for i in range(start, total - p)):
            return p
    return None
