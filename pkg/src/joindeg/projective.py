"""Exact projective linear algebra: points, lines with Pluecker keys, linear subspaces."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .errors import AmbientMismatch, CenterPoint, CoincidentPoints, ZeroVector
from .fields import Field


def rref(rows: Sequence[Sequence], field: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if not field.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.inv(A[r][c])
        A[r] = [field.mul(inv, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and not field.is_zero(A[i][c]):
                m = A[i][c]
                A[i] = [field.sub(x, field.mul(m, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(rows: Sequence[Sequence], field: Field) -> int:
    return len(rref(rows, field)[0])


def nullspace(rows: Sequence[Sequence], field: Field, ncols: int) -> list[list]:
    """Basis of {v : rows . v = 0}."""
    R, piv = rref(rows, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fcol in free:
        v = [field.zero] * ncols
        v[fcol] = field.one
        for row, pc in zip(R, piv):
            v[pc] = field.neg(row[fcol])
        basis.append(v)
    return basis


def _normalize(vec: Sequence, field: Field) -> tuple:
    lead = next((x for x in vec if not field.is_zero(x)), None)
    if lead is None:
        raise ZeroVector("the zero vector is not a projective point")
    inv = field.inv(lead)
    return tuple(field.mul(inv, x) for x in vec)


class ProjPoint:
    """Point of P^n, normalized so its first nonzero coordinate is 1."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords: Iterable):
        self.field = field
        self.coords = _normalize([field.coerce(x) for x in coords], field)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "[" + ":".join(self.field.format(c) for c in self.coords) + "]"


def plucker(u: Sequence, v: Sequence, field: Field) -> tuple:
    return tuple(
        field.sub(field.mul(u[i], v[j]), field.mul(u[j], v[i]))
        for i, j in combinations(range(len(u)), 2)
    )


def plucker_relations_hold(p: Sequence, n: int, field: Field) -> bool:
    """Grassmann-Pluecker quadrics p_ij p_kl - p_ik p_jl + p_il p_jk = 0."""
    idx = {ij: k for k, ij in enumerate(combinations(range(n + 1), 2))}
    for i, j, k, l in combinations(range(n + 1), 4):
        val = field.add(
            field.sub(
                field.mul(p[idx[(i, j)]], p[idx[(k, l)]]),
                field.mul(p[idx[(i, k)]], p[idx[(j, l)]]),
            ),
            field.mul(p[idx[(i, l)]], p[idx[(j, k)]]),
        )
        if not field.is_zero(val):
            return False
    return True


class ProjLine:
    """Line of P^n spanned by two distinct points; equality via Pluecker vectors."""

    __slots__ = ("field", "p", "q", "plucker")

    def __init__(self, p: ProjPoint, q: ProjPoint):
        if p.n != q.n or p.field != q.field:
            raise AmbientMismatch("points live in different spaces")
        if p == q:
            raise CoincidentPoints(f"{p} = {q}")
        self.field = p.field
        self.p, self.q = p, q
        self.plucker = _normalize(plucker(p.coords, q.coords, p.field), p.field)

    @property
    def n(self) -> int:
        return self.p.n

    def __eq__(self, other):
        return isinstance(other, ProjLine) and self.plucker == other.plucker

    def __hash__(self):
        return hash(self.plucker)

    def subspace(self) -> "LinearSubspace":
        return LinearSubspace(self.field, self.n, [self.p.coords, self.q.coords])

    def contains(self, pt: ProjPoint) -> bool:
        return rank([self.p.coords, self.q.coords, pt.coords], self.field) == 2

    def point_at(self, a, b) -> ProjPoint:
        f = self.field
        a, b = f.coerce(a), f.coerce(b)
        return ProjPoint(f, [f.add(f.mul(a, x), f.mul(b, y)) for x, y in zip(self.p.coords, self.q.coords)])

    def __repr__(self):
        return f"ProjLine({self.p}, {self.q})"


def line_through(x: ProjPoint, y: ProjPoint) -> ProjLine:
    return ProjLine(x, y)


class LinearSubspace:
    """Projective linear subspace of P^n stored as an RREF row basis."""

    __slots__ = ("field", "n", "rows")

    def __init__(self, field: Field, n: int, rows: Sequence[Sequence] = ()):
        rows = [[field.coerce(x) for x in r] for r in rows]
        if any(len(r) != n + 1 for r in rows):
            raise AmbientMismatch(f"rows must have length {n + 1}")
        self.field = field
        self.n = n
        self.rows = tuple(tuple(r) for r in rref(rows, field)[0]) if rows else ()

    @property
    def dim(self) -> int:
        return len(self.rows) - 1

    def is_empty(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        return (
            isinstance(other, LinearSubspace)
            and self.field == other.field
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash(self.rows)

    def contains(self, obj) -> bool:
        if isinstance(obj, ProjPoint):
            vecs = [obj.coords]
        elif isinstance(obj, ProjLine):
            vecs = [obj.p.coords, obj.q.coords]
        else:
            vecs = list(obj.rows)
        return rank(list(self.rows) + vecs, self.field) == len(self.rows)

    def annihilator(self) -> list[list]:
        """Linear forms (coefficient vectors) vanishing on the subspace."""
        return nullspace(list(self.rows), self.field, self.n + 1)

    def point(self) -> ProjPoint:
        if len(self.rows) != 1:
            raise ValueError("subspace is not a single point")
        return ProjPoint(self.field, self.rows[0])

    def __repr__(self):
        return f"LinearSubspace(dim={self.dim}, rows={[list(r) for r in self.rows]})"


def _as_rows(obj) -> list:
    if isinstance(obj, ProjPoint):
        return [obj.coords]
    if isinstance(obj, ProjLine):
        return [obj.p.coords, obj.q.coords]
    if isinstance(obj, LinearSubspace):
        return list(obj.rows)
    raise TypeError(f"cannot span {type(obj).__name__}")


def span_of(items: Sequence) -> LinearSubspace:
    if not items:
        raise ValueError("span of nothing needs an explicit ambient space")
    field, n = items[0].field, items[0].n
    rows = []
    for it in items:
        if it.field != field or it.n != n:
            raise AmbientMismatch("mixed ambient spaces in span")
        rows += _as_rows(it)
    return LinearSubspace(field, n, rows)


def intersect(u: LinearSubspace, v: LinearSubspace) -> LinearSubspace:
    if u.field != v.field or u.n != v.n:
        raise AmbientMismatch("subspaces in different spaces")
    forms = u.annihilator() + v.annihilator()
    return LinearSubspace(u.field, u.n, nullspace(forms, u.field, u.n + 1))


def ruled_projection(q: ProjPoint) -> ProjPoint:
    """Project P^{2n+1} -> P^n from the center {a_i = b_i}: (a - b)."""
    if q.n % 2 == 0:
        raise AmbientMismatch("ruled projection needs a point of P^{2n+1}")
    f = q.field
    half = (q.n + 1) // 2
    diff = [f.sub(a, b) for a, b in zip(q.coords[:half], q.coords[half:])]
    if all(f.is_zero(x) for x in diff):
        raise CenterPoint(f"{q} lies in the projection center")
    return ProjPoint(f, diff)


def random_matrix(field: Field, rows: int, cols: int, rng, box: int = 1000) -> list[list]:
    return [
        [field.random_element(rng, integral=True, box=box) for _ in range(cols)]
        for _ in range(rows)
    ]


def random_invertible(field: Field, size: int, rng, box: int = 1000, tries: int = 100) -> list[list]:
    for _ in range(tries):
        M = random_matrix(field, size, size, rng, box)
        if rank(M, field) == size:
            return M
    raise RuntimeError("could not sample an invertible matrix")


def random_subspace(field: Field, n: int, codim: int, rng, box: int = 1000, tries: int = 100) -> LinearSubspace:
    """Row space of a random full-rank (n+1-codim) x (n+1) matrix."""
    if not 0 <= codim <= n:
        raise ValueError(f"codim must lie in [0, {n}]")
    k = n + 1 - codim
    for _ in range(tries):
        M = random_matrix(field, k, n + 1, rng, box)
        if rank(M, field) == k:
            return LinearSubspace(field, n, M)
    raise RuntimeError("could not sample a full-rank subspace")
