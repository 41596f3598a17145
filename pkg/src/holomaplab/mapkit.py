"""Holomorphic self-maps of C^k: expression trees, evaluation, exact Jacobians.

A map is a small immutable expression tree.  Built-in families:

    Identity(k)                z -> z
    Linear(A)                  z -> A z
    Translation(t)             z -> z + t
    Henon(b)                   (z, w) -> (z^2 + b w, z)
    Harris(n)                  (z, w) -> (z + n w^2, w)
    DurenRudin(delta)          (z, w) -> (z, w + (z/delta)^2)
    ExpCoord(c, k)             coordinatewise z_i -> exp(c z_i) - 1
    PolyCoord(polys)           tuple of sparse multivariate polynomials

and combinators:

    Scalar(s, m)               z -> s * m(z)
    Compose(outer, inner)      z -> outer(inner(z))
    Affine(a, B, m)            z -> m(a + B z)

Jacobians are computed by forward-mode differentiation with holomorphic
dual numbers: a pair (v, d) carries the value together with a full
complex gradient row, multiplication follows (v, d)(v', d') =
(vv', v d' + v' d) and exp lifts to (e^v, e^v d).  All built-ins are
holomorphic, so one dual pass yields the exact Jacobian up to roundoff.
Evaluation is batch-aware: coordinates may be scalars or (N,) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import DimensionMismatch


# --------------------------------------------------------------------------
# holomorphic dual numbers


def _row(x):
    """Broadcast a value over the trailing derivative axis."""
    x = np.asarray(x)
    return x if x.ndim == 0 else x[..., None]


class _Dual:
    """Value plus complex gradient row for forward-mode differentiation."""

    __slots__ = ("val", "der")

    def __init__(self, val, der):
        self.val = val
        self.der = der

    def __add__(self, other):
        if isinstance(other, _Dual):
            return _Dual(self.val + other.val, self.der + other.der)
        return _Dual(self.val + other, self.der)

    __radd__ = __add__

    def __neg__(self):
        return _Dual(-self.val, -self.der)

    def __sub__(self, other):
        if isinstance(other, _Dual):
            return _Dual(self.val - other.val, self.der - other.der)
        return _Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return _Dual(other - self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, _Dual):
            return _Dual(
                self.val * other.val,
                _row(self.val) * other.der + _row(other.val) * self.der,
            )
        return _Dual(self.val * other, _row(other) * self.der)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise TypeError("map coordinates support nonnegative integer powers only")
        if n == 0:
            return _Dual(np.ones_like(np.asarray(self.val)), np.zeros_like(np.asarray(self.der)))
        out = self
        for _ in range(int(n) - 1):
            out = out * self
        return out


def _exp(x):
    if isinstance(x, _Dual):
        ev = np.exp(x.val)
        return _Dual(ev, _row(ev) * x.der)
    return np.exp(x)


# --------------------------------------------------------------------------
# expression nodes


class MapExpr:
    """Base class of holomorphic map expressions C^k -> C^k (immutable)."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def apply(self, coords):
        """Evaluate on a tuple of scalar-like coordinates (numbers, arrays or
        dual numbers); returns a tuple of the same kind."""
        raise NotImplementedError

    def __repr__(self):
        return to_text(self)

    def __ne__(self, other):
        return not self.__eq__(other)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Identity(MapExpr):
    def __init__(self, k: int):
        k = int(k)
        if k < 1:
            raise DimensionMismatch("identity needs dimension k >= 1")
        self.k = k

    @property
    def dim(self):
        return self.k

    def apply(self, coords):
        return tuple(coords)

    def __eq__(self, other):
        return type(other) is Identity and other.k == self.k

    def __hash__(self):
        return hash(("identity", self.k))


class Linear(MapExpr):
    def __init__(self, matrix):
        self.matrix = _frozen(algebra.as_matrix(matrix))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, coords):
        return _affine_apply(None, self.matrix, coords)

    def __eq__(self, other):
        return type(other) is Linear and np.array_equal(other.matrix, self.matrix)

    def __hash__(self):
        return hash(("linear", self.matrix.tobytes()))


class Translation(MapExpr):
    def __init__(self, offset):
        self.offset = _frozen(algebra.as_vector(offset))

    @property
    def dim(self):
        return self.offset.size

    def apply(self, coords):
        return tuple(c + t for c, t in zip(coords, self.offset))

    def __eq__(self, other):
        return type(other) is Translation and np.array_equal(other.offset, self.offset)

    def __hash__(self):
        return hash(("translation", self.offset.tobytes()))


class Henon(MapExpr):
    """(z, w) -> (z^2 + b w, z), the model polynomial automorphism of C^2."""

    def __init__(self, b):
        self.b = complex(b)

    @property
    def dim(self):
        return 2

    def apply(self, coords):
        z, w = coords
        return (z * z + self.b * w, z)

    def __eq__(self, other):
        return type(other) is Henon and other.b == self.b

    def __hash__(self):
        return hash(("henon", self.b))


class Harris(MapExpr):
    """(z, w) -> (z + n w^2, w); its polydisc image pinches balls of radius
    above sqrt(2/n)."""

    def __init__(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("harris parameter n must be a positive integer")
        self.n = n

    @property
    def dim(self):
        return 2

    def apply(self, coords):
        z, w = coords
        return (z + self.n * (w * w), w)

    def __eq__(self, other):
        return type(other) is Harris and other.n == self.n

    def __hash__(self):
        return hash(("harris", self.n))


class DurenRudin(MapExpr):
    """(z, w) -> (z, w + (z/delta)^2); volume-preserving shear whose polydisc
    image contains no closed ball of radius delta."""

    def __init__(self, delta):
        delta = float(delta)
        if not delta > 0:
            raise ValueError("durenrudin parameter delta must be positive")
        self.delta = delta
        self._inv_delta = 1.0 / delta

    @property
    def dim(self):
        return 2

    def apply(self, coords):
        z, w = coords
        u = z * self._inv_delta
        return (z, w + u * u)

    def __eq__(self, other):
        return type(other) is DurenRudin and other.delta == self.delta

    def __hash__(self):
        return hash(("durenrudin", self.delta))


class ExpCoord(MapExpr):
    """Coordinatewise z_i -> exp(c z_i) - 1; fixes 0 with Jacobian c*I."""

    def __init__(self, c, k: int):
        k = int(k)
        if k < 1:
            raise DimensionMismatch("expcoord needs dimension k >= 1")
        self.c = complex(c)
        self.k = k

    @property
    def dim(self):
        return self.k

    def apply(self, coords):
        return tuple(_exp(self.c * c) - 1.0 for c in coords)

    def __eq__(self, other):
        return type(other) is ExpCoord and other.c == self.c and other.k == self.k

    def __hash__(self):
        return hash(("expcoord", self.c, self.k))


class Scalar(MapExpr):
    """z -> s * inner(z) with s != 0."""

    def __init__(self, s, inner: MapExpr):
        s = complex(s)
        if s == 0:
            raise ValueError("scalar factor must be nonzero")
        self.s = s
        self.inner = inner

    @property
    def dim(self):
        return self.inner.dim

    def apply(self, coords):
        return tuple(self.s * y for y in self.inner.apply(coords))

    def __eq__(self, other):
        return type(other) is Scalar and other.s == self.s and other.inner == self.inner

    def __hash__(self):
        return hash(("scalar", self.s, self.inner))


class Compose(MapExpr):
    """z -> outer(inner(z)); both factors must share the same dimension."""

    def __init__(self, outer: MapExpr, inner: MapExpr):
        if outer.dim != inner.dim:
            raise DimensionMismatch(
                f"compose: outer has k={outer.dim}, inner has k={inner.dim}"
            )
        self.outer = outer
        self.inner = inner

    @property
    def dim(self):
        return self.outer.dim

    def apply(self, coords):
        return self.outer.apply(self.inner.apply(coords))

    def __eq__(self, other):
        return (
            type(other) is Compose
            and other.outer == self.outer
            and other.inner == self.inner
        )

    def __hash__(self):
        return hash(("compose", self.outer, self.inner))


class Affine(MapExpr):
    """z -> inner(a + B z): precomposition with an affine change of variable."""

    def __init__(self, shift, matrix, inner: MapExpr):
        self.shift = _frozen(algebra.as_vector(shift))
        self.matrix = _frozen(algebra.as_matrix(matrix))
        if self.shift.size != self.matrix.shape[0] or self.shift.size != inner.dim:
            raise DimensionMismatch(
                f"affine: shift k={self.shift.size}, matrix {self.matrix.shape}, "
                f"inner k={inner.dim}"
            )
        self.inner = inner

    @property
    def dim(self):
        return self.inner.dim

    def apply(self, coords):
        return self.inner.apply(_affine_apply(self.shift, self.matrix, coords))

    def __eq__(self, other):
        return (
            type(other) is Affine
            and np.array_equal(other.shift, self.shift)
            and np.array_equal(other.matrix, self.matrix)
            and other.inner == self.inner
        )

    def __hash__(self):
        return hash(("affine", self.shift.tobytes(), self.matrix.tobytes(), self.inner))


class PolyCoord(MapExpr):
    """Tuple of sparse multivariate polynomials in z1..zk, one per coordinate.

    Each polynomial is a sequence of (exponents, coefficient) terms where
    exponents is a length-k tuple of nonnegative ints.  Terms are merged,
    zero coefficients dropped, and the term list sorted, so structurally
    equal polynomials compare equal.
    """

    def __init__(self, polys):
        polys = list(polys)
        if not polys:
            raise DimensionMismatch("polycoord needs at least one coordinate")
        k = len(polys)
        normalized = []
        for poly in polys:
            items = poly.items() if isinstance(poly, dict) else poly
            merged: dict = {}
            for exps, coeff in items:
                exps = tuple(int(e) for e in exps)
                if len(exps) != k:
                    raise DimensionMismatch(
                        f"term exponent tuple {exps} does not have length k={k}"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError("exponents must be nonnegative")
                merged[exps] = merged.get(exps, 0j) + complex(coeff)
            normalized.append(
                tuple(sorted((e, c) for e, c in merged.items() if c != 0))
            )
        self.polys = tuple(normalized)
        self.k = k

    @property
    def dim(self):
        return self.k

    def apply(self, coords):
        out = []
        for terms in self.polys:
            acc = 0.0 * coords[0]  # anchors shape/dual structure for empty polys
            for exps, coeff in terms:
                mono = None
                for j, e in enumerate(exps):
                    if e == 0:
                        continue
                    factor = coords[j] ** e
                    mono = factor if mono is None else mono * factor
                term = coeff if mono is None else (mono if coeff == 1 else coeff * mono)
                acc = acc + term
            out.append(acc)
        return tuple(out)

    def __eq__(self, other):
        return type(other) is PolyCoord and other.polys == self.polys

    def __hash__(self):
        return hash(("polycoord", self.polys))


def _affine_apply(shift, matrix, coords):
    k = len(coords)
    out = []
    for i in range(k):
        acc = shift[i] if shift is not None else None
        for j in range(k):
            term = matrix[i, j] * coords[j]
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


# --------------------------------------------------------------------------
# jets and domains


@dataclass
class Jet:
    """Map value together with the exact complex Jacobian at the same point."""

    value: np.ndarray
    jacobian: np.ndarray


@dataclass(frozen=True)
class DomainSpec:
    """Ball (Euclidean norm) or polydisc (max norm) of a given radius in C^k.

    Membership is strict: z belongs to the domain iff norm(z) < radius.
    """

    shape: str
    radius: float
    dim: int

    def __post_init__(self):
        if self.shape not in ("ball", "polydisc"):
            raise ValueError(f"unknown domain shape {self.shape!r}")
        if not self.radius > 0:
            raise ValueError("domain radius must be positive")
        if self.dim < 1:
            raise DimensionMismatch("domain dimension must be >= 1")

    @staticmethod
    def ball(dim: int, radius: float = 1.0) -> "DomainSpec":
        return DomainSpec("ball", float(radius), int(dim))

    @staticmethod
    def polydisc(dim: int, radius: float = 1.0) -> "DomainSpec":
        return DomainSpec("polydisc", float(radius), int(dim))

    def norm(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.shape == "ball":
            return np.linalg.norm(z, axis=-1)
        return np.abs(z).max(axis=-1)

    def margin(self, z):
        """Distance to the boundary in the domain's norm (negative outside)."""
        return self.radius - self.norm(z)

    def contains(self, z, margin: float = 0.0) -> bool:
        return bool(np.all(self.margin(z) > margin))


# --------------------------------------------------------------------------
# evaluation and differentiation


def _check_dim(m: MapExpr, size: int):
    if size != m.dim:
        raise DimensionMismatch(f"point has k={size}, map has k={m.dim}")


def evaluate(m: MapExpr, z) -> np.ndarray:
    """Evaluate a map at one point of C^k.

    Routed through the batch path so single-point and batched evaluation
    share one arithmetic path bit for bit.
    """
    v = algebra.as_vector(z)
    return evaluate_batch(m, v[None, :])[0]


def evaluate_batch(m: MapExpr, pts) -> np.ndarray:
    """Evaluate a map at N points at once; pts has shape (N, k)."""
    Z = np.asarray(pts, dtype=np.complex128)
    if Z.ndim != 2:
        raise DimensionMismatch(f"expected an (N, k) point array, got shape {Z.shape}")
    _check_dim(m, Z.shape[1])
    out = m.apply(tuple(Z[:, j] for j in range(Z.shape[1])))
    cols = [np.broadcast_to(np.asarray(c, dtype=np.complex128), (Z.shape[0],)) for c in out]
    return np.stack(cols, axis=1)


def jacobian(m: MapExpr, z) -> Jet:
    """Value and exact Jacobian at one point, via one dual-number pass.

    Routed through the batch path (one row) for bitwise consistency with
    jacobian_batch.
    """
    v = algebra.as_vector(z)
    values, jacs = jacobian_batch(m, v[None, :])
    return Jet(values[0], jacs[0])


def jacobian_batch(m: MapExpr, pts):
    """Values (N, k) and Jacobians (N, k, k) at N points in one dual pass."""
    Z = np.asarray(pts, dtype=np.complex128)
    if Z.ndim != 2:
        raise DimensionMismatch(f"expected an (N, k) point array, got shape {Z.shape}")
    _check_dim(m, Z.shape[1])
    n, k = Z.shape
    duals = []
    for j in range(k):
        der = np.zeros((n, k), dtype=np.complex128)
        der[:, j] = 1.0
        duals.append(_Dual(Z[:, j], der))
    out = m.apply(tuple(duals))
    values = np.empty((n, k), dtype=np.complex128)
    jacs = np.empty((n, k, k), dtype=np.complex128)
    for i, o in enumerate(out):
        if isinstance(o, _Dual):
            values[:, i] = np.broadcast_to(np.asarray(o.val), (n,))
            jacs[:, i, :] = np.broadcast_to(np.asarray(o.der), (n, k))
        else:
            values[:, i] = np.broadcast_to(np.asarray(o), (n,))
            jacs[:, i, :] = 0.0
    return values, jacs


# --------------------------------------------------------------------------
# structural combinators


def reparametrize(m: MapExpr, a, B) -> MapExpr:
    """Structural z -> m(a + B z); no numeric folding, so the returned map
    evaluates exactly the composed arithmetic."""
    return Affine(a, B, m)


def dilate(m: MapExpr, R: float) -> MapExpr:
    """z -> (1/R) m(R z).  Preserves the Jacobian at the origin."""
    R = float(R)
    if not R > 0:
        raise ValueError("dilation factor must be positive")
    k = m.dim
    inner = Affine(np.zeros(k), R * np.eye(k), m)
    return Scalar(1.0 / R, inner)


# --------------------------------------------------------------------------
# text form (the parser lives in _grammar; printing stays here so nodes can
# repr themselves)


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0.0:
        return _fmt_real(c.real)
    if c.real == 0.0:
        return _fmt_real(c.imag) + "i"
    sign = "+" if c.imag > 0 else "-"
    return f"{_fmt_real(c.real)}{sign}{_fmt_real(abs(c.imag))}i"


def _fmt_vector(v: np.ndarray) -> str:
    return "[" + ", ".join(_fmt_complex(x) for x in v) + "]"


def _fmt_matrix(a: np.ndarray) -> str:
    return "[" + ", ".join(_fmt_vector(row) for row in a) + "]"


def _fmt_poly(terms, k: int) -> str:
    if not terms:
        return "0"
    parts = []
    for exps, coeff in terms:
        factors = [
            f"z{j + 1}" if e == 1 else f"z{j + 1}^{e}"
            for j, e in enumerate(exps)
            if e > 0
        ]
        if not factors:
            parts.append(_fmt_complex(coeff))
            continue
        mono = "*".join(factors)
        if coeff == 1:
            parts.append(mono)
        else:
            ctext = _fmt_complex(coeff)
            if ("+" in ctext[1:]) or ("-" in ctext[1:]):
                ctext = f"({ctext})"
            parts.append(f"{ctext}*{mono}")
    return " + ".join(parts)


def to_text(m: MapExpr) -> str:
    """Canonical textual form; parse(to_text(m)) reproduces the tree."""
    if isinstance(m, Identity):
        return f"identity(k={m.k})"
    if isinstance(m, Linear):
        return f"linear(a={_fmt_matrix(m.matrix)})"
    if isinstance(m, Translation):
        return f"translation(t={_fmt_vector(m.offset)})"
    if isinstance(m, Henon):
        return f"henon(b={_fmt_complex(m.b)})"
    if isinstance(m, Harris):
        return f"harris(n={m.n})"
    if isinstance(m, DurenRudin):
        return f"durenrudin(delta={_fmt_real(m.delta)})"
    if isinstance(m, ExpCoord):
        return f"expcoord(c={_fmt_complex(m.c)}, k={m.k})"
    if isinstance(m, Scalar):
        return f"scalar(s={_fmt_complex(m.s)}, {to_text(m.inner)})"
    if isinstance(m, Compose):
        return f"compose({to_text(m.outer)}, {to_text(m.inner)})"
    if isinstance(m, Affine):
        return f"affine({_fmt_vector(m.shift)}, {_fmt_matrix(m.matrix)}, {to_text(m.inner)})"
    if isinstance(m, PolyCoord):
        return "(" + ", ".join(_fmt_poly(p, m.k) for p in m.polys) + ")"
    raise TypeError(f"unknown map node {type(m).__name__}")


def parse(text: str) -> MapExpr:
    """Parse the map grammar (see the _grammar module for the EBNF)."""
    from . import _grammar

    return _grammar.parse(text)
