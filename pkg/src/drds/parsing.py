"""Text grammar for expressions, difference equations and transformations.

Grammar: identifiers, integer literals, rational literals p/q, operators
+ - * / ^ (non-negative integer powers), parentheses; indexed sequence
variables x[n], x[n-1], ...; plain state variables x1..xk; any other
identifier is a free parameter.  The canonical printers emit a normal
form that parses back to an equal object.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import LagTooDeep, ParseError, UnknownSymbol
from .poly import Polynomial, RationalFunction

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[\[\]()+\-*/^=,]))"
)


def tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", position=pos)
        if m.group("int") is not None:
            tokens.append(("int", int(m.group("int")), pos))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), pos))
        else:
            tokens.append(("op", m.group("op"), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing RationalFunction values."""

    def __init__(self, tokens, context, lag_lookup=None):
        self.tokens = tokens
        self.i = 0
        self.context = tuple(context)
        self.lag_lookup = lag_lookup or {}

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", position=pos)

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def parse_expr(self) -> RationalFunction:
        value = self.parse_term()
        while self.at_op("+", "-"):
            _, op, _ = self.next()
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> RationalFunction:
        value = self.parse_factor()
        while self.at_op("*", "/"):
            _, op, _ = self.next()
            rhs = self.parse_factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def parse_factor(self) -> RationalFunction:
        if self.at_op("+", "-"):
            _, op, _ = self.next()
            value = self.parse_factor()
            return value if op == "+" else -value
        return self.parse_power()

    def parse_power(self) -> RationalFunction:
        base = self.parse_atom()
        if self.at_op("^"):
            self.next()
            kind, val, pos = self.next()
            if kind != "int":
                raise ParseError("exponent must be a non-negative integer", position=pos)
            return base ** val
        return base

    def parse_atom(self) -> RationalFunction:
        kind, val, pos = self.next()
        if kind == "int":
            return RationalFunction.constant(self.context, val)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if kind == "ident":
            if self.at_op("["):
                name = self._parse_indexed(val, pos)
            else:
                name = val
            if name not in self.context:
                raise UnknownSymbol(f"unknown symbol {name!r}")
            return RationalFunction.variable(self.context, name)
        raise ParseError("expected a number, variable or parenthesized expression", position=pos)

    def _parse_indexed(self, symbol, pos) -> str:
        self.expect_op("[")
        kind, val, p2 = self.next()
        if kind != "ident" or val != "n":
            raise ParseError("indexed variables must use the index symbol n", position=p2)
        offset = 0
        if self.at_op("+", "-"):
            _, op, _ = self.next()
            kind, val, p3 = self.next()
            if kind != "int":
                raise ParseError("index offset must be an integer", position=p3)
            offset = val if op == "+" else -val
        self.expect_op("]")
        key = (symbol, offset)
        if key not in self.lag_lookup:
            if offset > 0:
                raise LagTooDeep(f"{symbol}[n+{offset}] may not appear on the right-hand side")
            raise LagTooDeep(f"lag {symbol}[n{offset:+d}] exceeds the declared order")
        return self.lag_lookup[key]


def _collect_idents(tokens):
    plain = []
    indexed = {}
    i = 0
    while i < len(tokens):
        kind, val, pos = tokens[i]
        if kind == "ident" and i + 1 < len(tokens) and tokens[i + 1][:2] == ("op", "["):
            j = i + 2
            if j < len(tokens) and tokens[j][:2] == ("ident", "n"):
                j += 1
                offset = 0
                if j + 1 < len(tokens) and tokens[j][0] == "op" and tokens[j][1] in "+-" and tokens[j + 1][0] == "int":
                    offset = tokens[j + 1][1] if tokens[j][1] == "+" else -tokens[j + 1][1]
                    j += 2
                if j < len(tokens) and tokens[j][:2] == ("op", "]"):
                    indexed.setdefault(val, set()).add(offset)
                    i = j + 1
                    continue
            raise ParseError("malformed indexed variable", position=pos)
        if kind == "ident":
            plain.append(val)
        i += 1
    return plain, indexed


_NATURAL_RE = re.compile(r"(\d+)")


def natural_key(name: str):
    return tuple(int(p) if p.isdigit() else p for p in _NATURAL_RE.split(name))


def lag_variable_names(order: int) -> tuple:
    """Canonical lag variable names x[n], x[n-1], ..., newest first."""
    return tuple("x[n]" if j == 0 else f"x[n-{j}]" for j in range(order))


_LAG_NAME_RE = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)\[n(?:-(\d+))?\]")


def parse_expression(text: str, context) -> RationalFunction:
    """Parse an expression over an explicit variable context.

    Context names of the form x[n], x[n-1], ... are recognized as indexed
    lag variables; everything else is a plain symbol.
    """
    tokens = tokenize(text)
    lag_lookup = {}
    for name in context:
        m = _LAG_NAME_RE.fullmatch(name)
        if m:
            lag_lookup[(m.group(1), -int(m.group(2) or 0))] = name
    parser = _Parser(tokens, context, lag_lookup)
    value = parser.parse_expr()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise ParseError("trailing input after expression", position=pos)
    return value


def parse_equation(text: str, order: int | None = None):
    """Parse "x[n+1] = <expr>" into a DifferenceEquation.

    The order is inferred from the deepest lag unless given explicitly; any
    non-indexed identifier on the right becomes a free parameter.
    """
    from .systems import DifferenceEquation

    tokens = tokenize(text)
    eq_positions = [i for i, t in enumerate(tokens) if t[:2] == ("op", "=")]
    if len(eq_positions) != 1:
        raise ParseError("an equation needs exactly one '='", position=0)
    split = eq_positions[0]
    lhs, rhs = tokens[:split], tokens[split + 1:]

    if not (
        len(lhs) == 6
        and lhs[0][0] == "ident"
        and lhs[1][:2] == ("op", "[")
        and lhs[2][:2] == ("ident", "n")
        and lhs[3][:2] == ("op", "+")
        and lhs[4][:2] == ("int", 1)
        and lhs[5][:2] == ("op", "]")
    ):
        raise ParseError("left-hand side must be of the form x[n+1]", position=lhs[0][2] if lhs else 0)
    symbol = lhs[0][1]

    if not rhs or rhs[-1][0] != "end":
        rhs = rhs + [("end", None, len(text))]
    plain, indexed = _collect_idents(rhs)
    for other in indexed:
        if other != symbol:
            raise UnknownSymbol(f"indexed symbol {other!r} does not match the sequence symbol {symbol!r}")
    offsets = indexed.get(symbol, set())
    future = [o for o in offsets if o > 0]
    if future:
        raise LagTooDeep(f"{symbol}[n+{max(future)}] may not appear on the right-hand side")
    max_lag = max((-o for o in offsets), default=0)
    if order is None:
        order = max_lag + 1
    elif max_lag + 1 > order:
        raise LagTooDeep(f"lag {max_lag} exceeds declared order {order}")

    params = tuple(sorted(set(p for p in plain if p != "n"), key=natural_key))
    lag_names = lag_variable_names(order)
    context = lag_names + params
    lag_lookup = {(symbol, -j): lag_names[j] for j in range(order)}
    parser = _Parser(rhs, context, lag_lookup)
    value = parser.parse_expr()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise ParseError("trailing input after expression", position=pos)
    return DifferenceEquation(order=order, rhs=value, parameters=params)


def parse_map(text: str, variables=None):
    """Parse a comma-separated component list into a Transformation.

    State variables are taken from `variables` when given; otherwise they are
    x1..xk when those names occur, and else the first k distinct identifiers
    in natural sort order.  Remaining identifiers are free parameters.
    """
    from .systems import Transformation

    tokens = tokenize(text)
    # split on top-level commas
    groups = []
    depth = 0
    current = []
    for tok in tokens:
        if tok[0] == "op" and tok[1] in "([":
            depth += 1
        elif tok[0] == "op" and tok[1] in ")]":
            depth -= 1
        if tok[0] == "op" and tok[1] == "," and depth == 0:
            groups.append(current)
            current = []
            continue
        if tok[0] != "end":
            current.append(tok)
    groups.append(current)
    if any(not g for g in groups):
        raise ParseError("empty map component", position=0)
    k = len(groups)

    idents = []
    for g in groups:
        plain, indexed = _collect_idents(g)
        if indexed:
            raise ParseError("indexed variables are not allowed in map components", position=0)
        idents.extend(plain)
    distinct = sorted(set(idents), key=natural_key)

    if variables is not None:
        state = tuple(variables)
        for v in state:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ParseError(f"invalid variable name {v!r}", position=0)
    else:
        numbered = [f"x{i}" for i in range(1, k + 1)]
        if all(v in distinct for v in numbered):
            state = tuple(numbered)
        else:
            if len(distinct) < k:
                # fewer symbols than components: pad with canonical names
                state = tuple(distinct) + tuple(
                    f"x{i}" for i in range(len(distinct) + 1, k + 1)
                )
            else:
                state = tuple(distinct[:k])
    params = tuple(v for v in distinct if v not in state)
    context = state + params

    components = []
    for g in groups:
        parser = _Parser(g + [("end", None, 0)], context)
        value = parser.parse_expr()
        kind, _, pos = parser.peek()
        if kind != "end":
            raise ParseError("trailing input after map component", position=pos)
        components.append(value)
    return Transformation(dim=k, components=components, variables=state, parameters=params)


# --- canonical printers ---------------------------------------------------


def _format_coefficient(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _needs_brackets(name: str) -> bool:
    return "[" in name


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for mono, coeff in p.sorted_terms():
        factors = []
        for name, e in zip(p.context, mono):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{e}")
        mag = abs(coeff)
        if not factors:
            body = _format_coefficient(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(mag)] + factors)
        pieces.append(("-" if coeff < 0 else "+", body))
    sign, body = pieces[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def format_rational(f: RationalFunction) -> str:
    num = format_polynomial(f.num)
    if f.den.is_constant() and f.den.constant_value() == 1:
        return num
    return f"({num})/({format_polynomial(f.den)})"


def format_equation(eq) -> str:
    return f"x[n+1] = {format_rational(eq.rhs)}"


def format_map(tr) -> str:
    return ", ".join(format_rational(c) for c in tr.components)
