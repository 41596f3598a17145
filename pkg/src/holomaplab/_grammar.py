"""Recursive-descent parser for the map grammar.

EBNF sketch (whitespace insignificant, complex literals written a+bi):

    map      := builtin | tuple
              | "compose" "(" map "," map ")"
              | "affine"  "(" vector "," matrix "," map ")"
              | "dilate"  "(" real "," map ")"
              | "scalar"  "(" "s" "=" complex "," map ")"
    builtin  := name "(" params ")"          named parameters, any order
    tuple    := "(" poly { "," poly } ")"    one polynomial per coordinate
    poly     := expression over z1..zk with +, -, *, ^ (nonneg int) and
                complex literals; "i" is the imaginary unit
    vector   := "[" complex { "," complex } "]"
    matrix   := "[" vector { "," vector } "]"

Built-ins: identity(k=..), linear(a=matrix), translation(t=vector),
henon(b=..), harris(n=..), durenrudin(delta=..), expcoord(c=.., k=..).
"""

from __future__ import annotations

from .errors import ParseError
from . import mapkit

_PUNCT = "()[],=+-*^"
_NAME_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789")


class _Token:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                t = j + 1
                if t < n and text[t] in "+-":
                    t += 1
                if t < n and text[t].isdigit():
                    j = t
                    while j < n and text[j].isdigit():
                        j += 1
            value = float(text[i:j])
            # an 'i' suffix makes the literal imaginary, unless it starts a name
            if j < n and text[j] == "i" and (j + 1 >= n or text[j + 1] not in _NAME_CHARS):
                toks.append(_Token("IMAG", value, i))
                j += 1
            else:
                toks.append(_Token("NUM", value, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and text[j] in _NAME_CHARS:
                j += 1
            toks.append(_Token("NAME", text[i:j], i))
            i = j
            continue
        if ch in _PUNCT:
            toks.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(_Token("EOF", None, n))
    return toks


class _Poly:
    """Polynomial under construction: {sorted ((var, exp), ...): coeff}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, c):
        return cls({(): complex(c)} if c != 0 else {})

    @classmethod
    def var(cls, j):
        return cls({((j, 1),): 1.0 + 0j})

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0j) + c
        return _Poly(out)

    def __neg__(self):
        return _Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                exps = {}
                for v, e in k1 + k2:
                    exps[v] = exps.get(v, 0) + e
                key = tuple(sorted(exps.items()))
                out[key] = out.get(key, 0j) + c1 * c2
        return _Poly(out)

    def __pow__(self, n):
        out = _Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def max_var(self):
        return max((v for key in self.terms for v, _ in key), default=-1)

    def constant_value(self):
        """Complex value if the polynomial has no variables, else None."""
        if self.max_var() >= 0:
            return None
        return self.terms.get((), 0j)

    def to_terms(self, k):
        out = []
        for key, coeff in self.terms.items():
            if coeff == 0:
                continue
            exps = [0] * k
            for v, e in key:
                exps[v] = e
            out.append((tuple(exps), coeff))
        return out


_BUILTIN_PARAMS = {
    "identity": (("k", "int"),),
    "linear": (("a", "matrix"),),
    "translation": (("t", "vector"),),
    "henon": (("b", "complex"),),
    "harris": (("n", "int"),),
    "durenrudin": (("delta", "real"),),
    "expcoord": (("c", "complex"), ("k", "int")),
}

BUILTIN_SIGNATURES = (
    "identity(k=<int>)",
    "linear(a=<matrix>)",
    "translation(t=<vector>)",
    "henon(b=<complex>)",
    "harris(n=<int>)",
    "durenrudin(delta=<real>)",
    "expcoord(c=<complex>, k=<int>)",
    "scalar(s=<complex>, <map>)",
    "compose(<map>, <map>)",
    "affine(<vector>, <matrix>, <map>)",
    "dilate(<real>, <map>)",
    "(<poly>, ..., <poly>)    polynomials in z1..zk",
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"got {tok.value!r}", tok.pos, expected=(kind,))
        return self.advance()

    # -- entry points ------------------------------------------------------

    def parse_map(self) -> mapkit.MapExpr:
        tok = self.peek()
        if tok.kind == "(":
            return self.parse_tuple()
        if tok.kind == "NAME":
            return self.parse_named()
        raise ParseError(f"got {tok.value!r}", tok.pos, expected=("builtin name", "("))

    def parse_named(self) -> mapkit.MapExpr:
        tok = self.expect("NAME")
        name = tok.value
        if name == "compose":
            self.expect("(")
            outer = self.parse_map()
            self.expect(",")
            inner = self.parse_map()
            self.expect(")")
            return mapkit.Compose(outer, inner)
        if name == "affine":
            self.expect("(")
            shift = self.parse_vector()
            self.expect(",")
            matrix = self.parse_matrix()
            self.expect(",")
            inner = self.parse_map()
            self.expect(")")
            return mapkit.Affine(shift, matrix, inner)
        if name == "dilate":
            self.expect("(")
            factor = self.parse_real()
            self.expect(",")
            inner = self.parse_map()
            self.expect(")")
            return mapkit.dilate(inner, factor)
        if name == "scalar":
            self.expect("(")
            key = self.expect("NAME")
            if key.value != "s":
                raise ParseError(f"got parameter {key.value!r}", key.pos, expected=("s",))
            self.expect("=")
            s = self.parse_complex()
            self.expect(",")
            inner = self.parse_map()
            self.expect(")")
            return mapkit.Scalar(s, inner)
        if name in _BUILTIN_PARAMS:
            params = self.parse_params(name, _BUILTIN_PARAMS[name])
            return self.build_builtin(name, params, tok.pos)
        raise ParseError(
            f"unknown map constructor {name!r}",
            tok.pos,
            expected=tuple(_BUILTIN_PARAMS) + ("compose", "affine", "dilate", "scalar"),
        )

    def build_builtin(self, name, params, pos):
        try:
            if name == "identity":
                return mapkit.Identity(params["k"])
            if name == "linear":
                return mapkit.Linear(params["a"])
            if name == "translation":
                return mapkit.Translation(params["t"])
            if name == "henon":
                return mapkit.Henon(params["b"])
            if name == "harris":
                return mapkit.Harris(params["n"])
            if name == "durenrudin":
                return mapkit.DurenRudin(params["delta"])
            if name == "expcoord":
                return mapkit.ExpCoord(params["c"], params["k"])
        except ValueError as exc:
            raise ParseError(str(exc), pos) from exc
        raise ParseError(f"unknown builtin {name!r}", pos)

    def parse_params(self, name, spec):
        self.expect("(")
        wanted = dict(spec)
        values = {}
        while True:
            key = self.expect("NAME")
            if key.value not in wanted:
                raise ParseError(
                    f"unknown parameter {key.value!r} for {name}",
                    key.pos,
                    expected=tuple(wanted),
                )
            if key.value in values:
                raise ParseError(f"duplicate parameter {key.value!r}", key.pos)
            self.expect("=")
            kind = wanted[key.value]
            if kind == "int":
                values[key.value] = self.parse_int()
            elif kind == "real":
                values[key.value] = self.parse_real()
            elif kind == "complex":
                values[key.value] = self.parse_complex()
            elif kind == "vector":
                values[key.value] = self.parse_vector()
            elif kind == "matrix":
                values[key.value] = self.parse_matrix()
            if self.peek().kind == ",":
                self.advance()
                continue
            break
        tok = self.expect(")")
        missing = [k for k, _ in spec if k not in values]
        if missing:
            raise ParseError(
                f"{name} is missing parameter(s) {', '.join(missing)}", tok.pos
            )
        return values

    # -- scalar / literal parsing -------------------------------------------

    def parse_const_expr(self) -> complex:
        tok = self.peek()
        poly = self.parse_poly_expr(allow_vars=False)
        value = poly.constant_value()
        if value is None:
            raise ParseError("variables are not allowed here", tok.pos)
        return value

    def parse_complex(self) -> complex:
        return complex(self.parse_const_expr())

    def parse_real(self) -> float:
        tok = self.peek()
        value = self.parse_const_expr()
        if value.imag != 0.0:
            raise ParseError("expected a real number", tok.pos)
        return float(value.real)

    def parse_int(self) -> int:
        tok = self.peek()
        value = self.parse_real()
        if value != int(value):
            raise ParseError("expected an integer", tok.pos)
        return int(value)

    def parse_vector(self):
        self.expect("[")
        out = [self.parse_complex()]
        while self.peek().kind == ",":
            self.advance()
            out.append(self.parse_complex())
        self.expect("]")
        return out

    def parse_matrix(self):
        self.expect("[")
        rows = [self.parse_vector()]
        while self.peek().kind == ",":
            self.advance()
            rows.append(self.parse_vector())
        self.expect("]")
        return rows

    # -- polynomial expressions ----------------------------------------------

    def parse_tuple(self) -> mapkit.MapExpr:
        self.expect("(")
        polys = [self.parse_poly_expr(allow_vars=True)]
        while self.peek().kind == ",":
            self.advance()
            polys.append(self.parse_poly_expr(allow_vars=True))
        tok = self.expect(")")
        k = len(polys)
        max_var = max(p.max_var() for p in polys)
        if max_var >= k:
            raise ParseError(
                f"variable z{max_var + 1} exceeds the map dimension k={k}", tok.pos
            )
        return mapkit.PolyCoord([p.to_terms(k) for p in polys])

    def parse_poly_expr(self, allow_vars: bool) -> _Poly:
        out = self.parse_poly_term(allow_vars)
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_poly_term(allow_vars)
            out = out + rhs if op == "+" else out - rhs
        return out

    def parse_poly_term(self, allow_vars: bool) -> _Poly:
        out = self.parse_poly_factor(allow_vars)
        while self.peek().kind == "*":
            self.advance()
            out = out * self.parse_poly_factor(allow_vars)
        return out

    def parse_poly_factor(self, allow_vars: bool) -> _Poly:
        tok = self.peek()
        if tok.kind == "-":
            self.advance()
            return -self.parse_poly_factor(allow_vars)
        if tok.kind == "+":
            self.advance()
            return self.parse_poly_factor(allow_vars)
        base = self.parse_poly_primary(allow_vars)
        while self.peek().kind == "^":
            self.advance()
            etok = self.expect("NUM")
            if etok.value != int(etok.value) or etok.value < 0:
                raise ParseError("exponent must be a nonnegative integer", etok.pos)
            base = base ** int(etok.value)
        return base

    def parse_poly_primary(self, allow_vars: bool) -> _Poly:
        tok = self.peek()
        if tok.kind == "NUM":
            self.advance()
            return _Poly.const(tok.value)
        if tok.kind == "IMAG":
            self.advance()
            return _Poly.const(tok.value * 1j)
        if tok.kind == "NAME":
            if tok.value == "i":
                self.advance()
                return _Poly.const(1j)
            if tok.value.startswith("z") and tok.value[1:].isdigit():
                index = int(tok.value[1:])
                if index < 1:
                    raise ParseError(f"bad variable {tok.value!r}", tok.pos)
                if not allow_vars:
                    raise ParseError("variables are not allowed here", tok.pos)
                self.advance()
                return _Poly.var(index - 1)
            raise ParseError(
                f"unexpected name {tok.value!r}", tok.pos, expected=("z<j>", "i", "number")
            )
        if tok.kind == "(":
            self.advance()
            inner = self.parse_poly_expr(allow_vars)
            self.expect(")")
            return inner
        raise ParseError(
            f"got {tok.value!r}", tok.pos, expected=("number", "z<j>", "i", "(")
        )


def parse(text: str) -> mapkit.MapExpr:
    parser = _Parser(text)
    m = parser.parse_map()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.value!r}", tok.pos, expected=("EOF",))
    return m
