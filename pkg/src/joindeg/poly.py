"""Exact polynomials: homogeneous forms, univariate and bivariate affine polynomials.

Coefficients are raw field values (see :mod:`joindeg.fields`); every polynomial
carries its field.  Representations are sparse where the instances are sparse
(``HomPoly``, ``BiPoly``) and dense for univariate eliminants (``UniPoly``).
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ArityMismatch,
    BothConstant,
    BothZero,
    DegreeCapExceeded,
    NotHomogeneous,
    PolynomialSyntaxError,
    SingularMatrix,
    ZeroPolynomial,
)
from .fields import Field, Rationals

DEGREE_CAP = 64


def _add_into(acc: dict, key, c, field: Field) -> None:
    v = field.add(acc.get(key, field.zero), c)
    if field.is_zero(v):
        acc.pop(key, None)
    else:
        acc[key] = v


def _mul_dicts(a: dict, b: dict, field: Field) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            _add_into(out, key, field.mul(ca, cb), field)
    return out


# ---------------------------------------------------------------------------
# Homogeneous forms


class HomPoly:
    """Homogeneous form of degree ``degree`` in ``nvars`` variables."""

    __slots__ = ("field", "nvars", "degree", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict, degree: int | None = None):
        clean = {}
        for e, c in terms.items():
            c = field.coerce(c)
            if not field.is_zero(c):
                e = tuple(e)
                if len(e) != nvars:
                    raise ArityMismatch(f"exponent {e} has wrong length for {nvars} variables")
                clean[e] = c
        degs = {sum(e) for e in clean}
        if len(degs) > 1:
            raise NotHomogeneous(f"monomials of degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise NotHomogeneous(f"declared degree {degree}, terms have degree {d}")
            degree = d
        elif degree is None:
            degree = 0
        if degree > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
        self.field = field
        self.nvars = nvars
        self.degree = degree
        self.terms = clean

    @classmethod
    def zero(cls, field: Field, nvars: int, degree: int) -> "HomPoly":
        return cls(field, nvars, {}, degree)

    @classmethod
    def linear_form(cls, field: Field, coeffs: Sequence) -> "HomPoly":
        n = len(coeffs)
        terms = {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)}
        return cls(field, n, terms, 1)

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "HomPoly") -> None:
        if self.field != other.field or self.nvars != other.nvars:
            raise ArityMismatch("forms over different rings")

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._compatible(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, c, self.field)
        return HomPoly(self.field, self.nvars, out, self.degree)

    def __neg__(self) -> "HomPoly":
        f = self.field
        return HomPoly(f, self.nvars, {e: f.neg(c) for e, c in self.terms.items()}, self.degree)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + (-other)

    def scale(self, c) -> "HomPoly":
        f = self.field
        c = f.coerce(c)
        return HomPoly(f, self.nvars, {e: f.mul(c, v) for e, v in self.terms.items()}, self.degree)

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            self._compatible(other)
            return HomPoly(
                self.field,
                self.nvars,
                _mul_dicts(self.terms, other.terms, self.field),
                self.degree + other.degree,
            )
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "HomPoly":
        out = HomPoly(self.field, self.nvars, {(0,) * self.nvars: 1}, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return (
            self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
            and (self.degree == other.degree or not self.terms)
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def evaluate(self, pt: Sequence):
        if len(pt) != self.nvars:
            raise ArityMismatch(f"point of length {len(pt)} for {self.nvars} variables")
        f = self.field
        pt = [f.coerce(x) for x in pt]
        acc = f.zero
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term = f.mul(term, f.power(x, k))
            acc = f.add(acc, term)
        return acc

    def derivative(self, i: int) -> "HomPoly":
        if not 0 <= i < self.nvars:
            raise ArityMismatch(f"variable index {i} out of range")
        f = self.field
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k == 0:
                continue
            c2 = f.mul(c, f.coerce(k))
            if f.is_zero(c2):
                continue
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c2
        return HomPoly(f, self.nvars, out, max(self.degree - 1, 0))

    def euler_holds(self) -> bool:
        """Check sum_i x_i df/dx_i == d * f (d reduced mod the characteristic)."""
        f = self.field
        acc: dict = {}
        for i in range(self.nvars):
            for e, c in self.derivative(i).terms.items():
                e2 = list(e)
                e2[i] += 1
                _add_into(acc, tuple(e2), c, f)
        return HomPoly(f, self.nvars, acc, self.degree) == self.scale(self.degree)

    def substitute_linear(self, M: Sequence[Sequence]) -> "HomPoly":
        """Return f(M x), i.e. x_i -> sum_j M[i][j] x_j."""
        f = self.field
        M = [[f.coerce(c) for c in row] for row in M]
        if len(M) != self.nvars or any(len(r) != self.nvars for r in M):
            raise ArityMismatch("substitution matrix has the wrong shape")
        if f.is_zero(determinant(M, f)):
            raise SingularMatrix("substitution matrix is singular")
        lin = [HomPoly.linear_form(f, row) for row in M]
        powers: dict = {}

        def pw(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = lin[i] ** k
            return powers[(i, k)]

        out = HomPoly.zero(f, self.nvars, self.degree)
        for e, c in self.terms.items():
            term = HomPoly(f, self.nvars, {(0,) * self.nvars: c}, 0)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    def to_uni(self) -> "UniPoly":
        """Dehomogenize a binary form at x1 = 1, as a polynomial in x0."""
        if self.nvars != 2:
            raise ArityMismatch("to_uni needs a binary form")
        coeffs = [self.field.zero] * (self.degree + 1)
        for (a, _b), c in self.terms.items():
            coeffs[a] = c
        return UniPoly(self.field, coeffs)

    def to_bi(self) -> "BiPoly":
        """Dehomogenize a ternary form at x2 = 1, as a polynomial in (x0, x1)."""
        if self.nvars != 3:
            raise ArityMismatch("to_bi needs a ternary form")
        return BiPoly(self.field, {(a, b): c for (a, b, _), c in self.terms.items()})

    def restrict_to_infinity(self) -> "HomPoly":
        """Set the last variable to zero (binary form on the line at infinity)."""
        terms = {e[:-1]: c for e, c in self.terms.items() if e[-1] == 0}
        return HomPoly(self.field, self.nvars - 1, terms, self.degree)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"s{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            cs = self.field.format(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"HomPoly({self.to_str()})"


def poly_eval(f: HomPoly, pt: Sequence):
    return f.evaluate(pt)


def partial_derivative(f: HomPoly, i: int) -> HomPoly:
    return f.derivative(i)


def linear_combination(forms: Sequence[HomPoly], coeffs: Sequence) -> HomPoly:
    """sum_j coeffs[j] * forms[j] (all forms share a ring and degree)."""
    f = forms[0].field
    acc: dict = {}
    for c, form in zip(coeffs, forms):
        c = f.coerce(c)
        if f.is_zero(c):
            continue
        for e, v in form.terms.items():
            _add_into(acc, e, f.mul(c, v), f)
    return HomPoly(f, forms[0].nvars, acc, forms[0].degree)


def determinant(M: Sequence[Sequence], field: Field):
    """Determinant by Gaussian elimination over the field."""
    A = [list(r) for r in M]
    n = len(A)
    det = field.one
    for col in range(n):
        piv = next((r for r in range(col, n) if not field.is_zero(A[r][col])), None)
        if piv is None:
            return field.zero
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = field.neg(det)
        det = field.mul(det, A[col][col])
        inv = field.inv(A[col][col])
        for r in range(col + 1, n):
            if field.is_zero(A[r][col]):
                continue
            m = field.mul(A[r][col], inv)
            A[r] = [field.sub(x, field.mul(m, y)) for x, y in zip(A[r], A[col])]
    return det


# ---------------------------------------------------------------------------
# Univariate polynomials


class UniPoly:
    """Dense univariate polynomial, coefficients from low to high degree."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Iterable):
        c = [field.coerce(x) for x in coeffs]
        while c and field.is_zero(c[-1]):
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    @classmethod
    def from_roots(cls, field: Field, roots: Iterable) -> "UniPoly":
        out = cls(field, [1])
        for r in roots:
            out = out * cls(field, [field.neg(field.coerce(r)), 1])
        return out

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = self.field.inv(self.lc)
        return UniPoly(self.field, [self.field.mul(inv, c) for c in self.coeffs])

    def __add__(self, other: "UniPoly") -> "UniPoly":
        f = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UniPoly(
            f,
            [f.add(a[i] if i < len(a) else f.zero, b[i] if i < len(b) else f.zero) for i in range(n)],
        )

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        f = self.field
        if not isinstance(other, UniPoly):
            c = f.coerce(other)
            return UniPoly(f, [f.mul(c, x) for x in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly(f, [])
        out = [f.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if f.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return UniPoly(f, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        f = self.field
        r = list(self.coeffs)
        db = other.degree
        inv = f.inv(other.lc)
        q = [f.zero] * max(len(r) - db, 0)
        for k in range(len(r) - 1 - db, -1, -1):
            c = f.mul(r[k + db], inv)
            q[k] = c
            if f.is_zero(c):
                continue
            for j, b in enumerate(other.coeffs):
                r[k + j] = f.sub(r[k + j], f.mul(c, b))
        return UniPoly(f, q), UniPoly(f, r[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self) -> "UniPoly":
        f = self.field
        return UniPoly(f, [f.mul(f.coerce(i), c) for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x):
        f = self.field
        x = f.coerce(x)
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def __repr__(self):
        if self.is_zero():
            return "UniPoly(0)"
        terms = [f"{c}*s^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "UniPoly(" + " + ".join(reversed(terms)) + ")"


def _integer_primitive(f: UniPoly) -> list[int]:
    den = 1
    for c in f.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in f.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient lists (low to high)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        lr = r[-1]
        r = [lb * c for c in r]
        for j, c in enumerate(b):
            r[k + j] -= lr * c
        while r and r[-1] == 0:
            r.pop()
    return r


def _content_free(c: list[int]) -> list[int]:
    g = 0
    for x in c:
        g = math.gcd(g, x)
    return [x // g for x in c] if g > 1 else c


def uni_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd.  Over Q the remainder sequence is kept primitive in Z[s]."""
    if f.is_zero() and g.is_zero():
        raise BothZero("gcd(0, 0) is undefined")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    field = f.field
    if isinstance(field, Rationals):
        a, b = _integer_primitive(f), _integer_primitive(g)
        if len(a) < len(b):
            a, b = b, a
        while b:
            r = _int_prem(a, b)
            a, b = b, _content_free(r)
        return UniPoly(field, a).monic()
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _pth_root(f: UniPoly) -> UniPoly:
    """For f = g(s^p) over F_p, return g (coefficients are their own p-th roots)."""
    p = f.field.char
    return UniPoly(f.field, f.coeffs[::p])


def squarefree_part(f: UniPoly) -> UniPoly:
    """Monic product of the distinct irreducible factors of f."""
    if f.is_zero():
        raise ZeroPolynomial("squarefree part of 0")
    f = f.monic()
    if f.degree == 0:
        return f
    d = f.derivative()
    if d.is_zero():
        return squarefree_part(_pth_root(f))
    g = uni_gcd(f, d)
    r = f // g
    if f.field.char == 0:
        return r.monic()
    # factors of multiplicity divisible by p survive only in g
    h = g
    while True:
        c = uni_gcd(h, r)
        if c.degree <= 0:
            break
        h = h // c
    if h.degree <= 0:
        return r.monic()
    rest = squarefree_part(_pth_root(h))
    return (r * rest // uni_gcd(r, rest)).monic()


def distinct_root_count(f: UniPoly) -> int:
    """Number of distinct roots in the algebraic closure."""
    return squarefree_part(f).degree


def sylvester_matrix(f: UniPoly, g: UniPoly) -> list[list]:
    m, n = f.degree, g.degree
    size = m + n
    zero = f.field.zero
    rows = []
    fc, gc = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    return rows


def _bareiss(M: list[list[int]]) -> int:
    A = [list(r) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def sylvester_resultant(f: UniPoly, g: UniPoly):
    """Resultant as the determinant of the Sylvester matrix.

    Over Q the rows are scaled to integers and the determinant is taken by
    fraction-free (Bareiss) elimination; over F_p plain elimination is used.
    """
    if f.degree < 1 and g.degree < 1:
        raise BothConstant("resultant needs a non-constant argument")
    if f.is_zero() or g.is_zero():
        return f.field.zero
    field = f.field
    S = sylvester_matrix(f, g)
    if isinstance(field, Rationals):
        scale = Fraction(1)
        rows = []
        for row in S:
            den = 1
            for c in row:
                den = den * c.denominator // math.gcd(den, c.denominator)
            rows.append([int(c * den) for c in row])
            scale *= den
        return Fraction(_bareiss(rows)) / scale
    return determinant(S, field)


# ---------------------------------------------------------------------------
# Bivariate affine polynomials in (s, t)


class BiPoly:
    """Sparse polynomial in affine variables s, t; keys are (deg_s, deg_t)."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: dict):
        clean = {}
        for e, c in terms.items():
            c = field.coerce(c)
            if not field.is_zero(c):
                clean[(int(e[0]), int(e[1]))] = c
        self.field = field
        self.terms = clean

    @classmethod
    def s(cls, field: Field) -> "BiPoly":
        return cls(field, {(1, 0): 1})

    @classmethod
    def t(cls, field: Field) -> "BiPoly":
        return cls(field, {(0, 1): 1})

    @classmethod
    def const(cls, field: Field, c) -> "BiPoly":
        return cls(field, {(0, 0): c})

    @classmethod
    def from_uni(cls, u: UniPoly, var: str) -> "BiPoly":
        if var == "s":
            return cls(u.field, {(i, 0): c for i, c in enumerate(u.coeffs)})
        return cls(u.field, {(0, i): c for i, c in enumerate(u.coeffs)})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(out, e, c, self.field)
        return BiPoly(self.field, out)

    def __neg__(self) -> "BiPoly":
        return BiPoly(self.field, {e: self.field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        f = self.field
        if isinstance(other, BiPoly):
            return BiPoly(f, _mul_dicts(self.terms, other.terms, f))
        c = f.coerce(other)
        return BiPoly(f, {e: f.mul(c, v) for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiPoly":
        out = BiPoly.const(self.field, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, s, t):
        f = self.field
        s, t = f.coerce(s), f.coerce(t)
        acc = f.zero
        for (a, b), c in self.terms.items():
            acc = f.add(acc, f.mul(c, f.mul(f.power(s, a), f.power(t, b))))
        return acc

    def substitute_linear(self, M: Sequence[Sequence]) -> "BiPoly":
        """Return f(M (s,t)^T): s -> M00 s + M01 t, t -> M10 s + M11 t."""
        f = self.field
        M = [[f.coerce(c) for c in row] for row in M]
        if f.is_zero(determinant(M, f)):
            raise SingularMatrix("substitution matrix is singular")
        ls = BiPoly(f, {(1, 0): M[0][0], (0, 1): M[0][1]})
        lt = BiPoly(f, {(1, 0): M[1][0], (0, 1): M[1][1]})
        out = BiPoly(f, {})
        sp: dict = {}
        tp: dict = {}
        for (a, b), c in self.terms.items():
            if a not in sp:
                sp[a] = ls**a
            if b not in tp:
                tp[b] = lt**b
            out = out + (sp[a] * tp[b]) * c
        return out

    def reduce_mod(self, p: int) -> "BiPoly":
        """Image over F_p of a polynomial over Q (ZeroDivisionError if p divides a denominator)."""
        from .fields import prime_field

        F = prime_field(p)
        return BiPoly(F, {e: F.coerce(c) for e, c in self.terms.items()})

    def univariate(self, var: str) -> UniPoly | None:
        """The polynomial as a UniPoly if it only involves ``var``, else None."""
        idx = 0 if var == "s" else 1
        other = 1 - idx
        if any(e[other] for e in self.terms):
            return None
        coeffs = [self.field.zero] * (max((e[idx] for e in self.terms), default=-1) + 1)
        for e, c in self.terms.items():
            coeffs[e[idx]] = c
        return UniPoly(self.field, coeffs)

    def __repr__(self):
        if not self.terms:
            return "BiPoly(0)"
        parts = [f"{c}*s^{a}*t^{b}" for (a, b), c in sorted(self.terms.items(), reverse=True)]
        return "BiPoly(" + " + ".join(parts) + ")"


def substitute_linear(f, M):
    return f.substitute_linear(M)


# ---------------------------------------------------------------------------
# Text grammar: integers, variables s0..s{k}, + - * ^ and parentheses


def _parse_node(node, nvars: int) -> dict:
    one = (0,) * nvars
    if isinstance(node, ast.Expression):
        return _parse_node(node.body, nvars)
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return {one: Fraction(node.value)} if node.value else {}
    if isinstance(node, ast.Name):
        name = node.id
        if len(name) >= 2 and name[0] == "s" and name[1:].isdigit():
            i = int(name[1:])
            if i < nvars:
                return {tuple(int(j == i) for j in range(nvars)): Fraction(1)}
        raise PolynomialSyntaxError(f"unknown variable {name!r} (expected s0..s{nvars - 1})")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _parse_node(node.operand, nvars)
        if isinstance(node.op, ast.USub):
            return {e: -c for e, c in inner.items()}
        return inner
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and type(node.right.value) is int):
                raise PolynomialSyntaxError("exponents must be non-negative integer literals")
            k = node.right.value
            if k < 0 or k > DEGREE_CAP:
                raise DegreeCapExceeded(f"exponent {k} outside [0, {DEGREE_CAP}]")
            base = _parse_node(node.left, nvars)
            out = {one: Fraction(1)}
            for _ in range(k):
                out = _mul_dicts(out, base, _Q)
            return out
        left, right = _parse_node(node.left, nvars), _parse_node(node.right, nvars)
        if isinstance(node.op, ast.Mult):
            return _mul_dicts(left, right, _Q)
        if isinstance(node.op, (ast.Add, ast.Sub)):
            out = dict(left)
            sign = 1 if isinstance(node.op, ast.Add) else -1
            for e, c in right.items():
                _add_into(out, e, sign * c, _Q)
            return out
    raise PolynomialSyntaxError(f"unsupported syntax: {ast.dump(node)[:60]}")


_Q = Rationals()


def parse_poly(text: str, field: Field, nvars: int) -> HomPoly:
    """Parse a homogeneous form such as ``"3*s0^2*s1 - s1^3"``.

    Integer coefficients are reduced into ``field``.  Non-homogeneous input is
    rejected.
    """
    if not isinstance(text, str) or not text.strip():
        raise PolynomialSyntaxError("empty polynomial text")
    if "**" in text:
        raise PolynomialSyntaxError("use ^ for powers")
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolynomialSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    terms = _parse_node(tree, nvars)
    return HomPoly(field, nvars, {e: field.coerce(c) for e, c in terms.items()})
