"""Zero-dimensional bivariate systems: lex Groebner bases, eliminants, solution counts.

Every incidence count in the package ends up here.  Points are counted in the
algebraic closure through squarefree degrees of eliminants; the number of
distinct solutions comes from a random shear s' = s + lam*t that separates them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import NotZeroDimensional, ShearDisagreement
from .fields import Field
from .poly import BiPoly, UniPoly, distinct_root_count

T_GT_S = "t>s"
S_GT_T = "s>t"


def _key(order: str):
    if order == T_GT_S:
        return lambda e: (e[1], e[0])
    if order == S_GT_T:
        return lambda e: (e[0], e[1])
    raise ValueError(f"unknown order {order!r}")


@dataclass(frozen=True)
class BivarSystem:
    generators: tuple[BiPoly, ...]
    provenance: str = "other"

    def __post_init__(self):
        if len(self.generators) < 2:
            raise ValueError("a bivariate system needs at least 2 generators")

    @property
    def field(self) -> Field:
        return self.generators[0].field


@dataclass(frozen=True)
class SolutionCount:
    P: int
    S: int
    T: int
    shears: tuple = ()
    certified: bool = False
    attempts: tuple = dc_field(default=())

    def __post_init__(self):
        if self.P and not (max(self.S, self.T) <= self.P <= self.S * self.T):
            raise ShearDisagreement(f"inconsistent counts P={self.P}, S={self.S}, T={self.T}")


class _Lex:
    """Monomial order helper bound to a field."""

    def __init__(self, field: Field, order: str):
        self.f = field
        self.key = _key(order)

    def lm(self, p: dict):
        return max(p, key=self.key)

    def monic(self, p: dict) -> dict:
        f = self.f
        inv = f.inv(p[self.lm(p)])
        return {e: f.mul(inv, c) for e, c in p.items()}

    def reduce(self, p: dict, basis: list[dict], lms: list) -> dict:
        """Full reduction of p modulo a monic basis."""
        f = self.f
        p = dict(p)
        rem: dict = {}
        while p:
            m = self.lm(p)
            c = p.pop(m)
            for g, gm in zip(basis, lms):
                if gm[0] <= m[0] and gm[1] <= m[1]:
                    sh = (m[0] - gm[0], m[1] - gm[1])
                    for e, v in g.items():
                        if e == gm:
                            continue
                        k = (e[0] + sh[0], e[1] + sh[1])
                        nv = f.sub(p.get(k, f.zero), f.mul(c, v))
                        if f.is_zero(nv):
                            p.pop(k, None)
                        else:
                            p[k] = nv
                    break
            else:
                rem[m] = c
        return rem

    def spoly(self, a: dict, b: dict, am, bm) -> dict:
        f = self.f
        l = (max(am[0], bm[0]), max(am[1], bm[1]))
        sa = (l[0] - am[0], l[1] - am[1])
        sb = (l[0] - bm[0], l[1] - bm[1])
        out: dict = {}
        for e, c in a.items():
            out[(e[0] + sa[0], e[1] + sa[1])] = c
        for e, c in b.items():
            k = (e[0] + sb[0], e[1] + sb[1])
            nv = f.sub(out.get(k, f.zero), c)
            if f.is_zero(nv):
                out.pop(k, None)
            else:
                out[k] = nv
        return out


def lex_groebner_2var(sys: BivarSystem | Sequence[BiPoly], order: str = T_GT_S) -> list[BiPoly]:
    """Reduced lex Groebner basis (Buchberger, normal selection, both criteria).

    The basis is returned sorted by decreasing leading monomial, so for
    ``t>s`` an eliminant in s, if present, is the last element.
    """
    gens = sys.generators if isinstance(sys, BivarSystem) else tuple(sys)
    field = gens[0].field
    lx = _Lex(field, order)
    G: list[dict] = []
    L: list = []
    for g in gens:
        if g.terms:
            p = lx.monic(dict(g.terms))
            G.append(p)
            L.append(lx.lm(p))
    if not G:
        raise NotZeroDimensional("all generators are zero")
    if (0, 0) in L:
        return [BiPoly.const(field, 1)]
    def lcm(i, j):
        return (max(L[i][0], L[j][0]), max(L[i][1], L[j][1]))

    pairs: set = set()
    heap: list = []

    def push(i, j):
        pairs.add((i, j))
        heapq.heappush(heap, (lx.key(lcm(i, j)), (i, j)))

    for i in range(len(G)):
        for j in range(i):
            push(i, j)

    while heap:
        _, (i, j) = heapq.heappop(heap)
        pairs.discard((i, j))
        a, b = L[i], L[j]
        if min(a[0], b[0]) == 0 and min(a[1], b[1]) == 0:
            continue  # coprime leading monomials
        m = lcm(i, j)
        if any(
            k != i and k != j and L[k][0] <= m[0] and L[k][1] <= m[1]
            and (max(i, k), min(i, k)) not in pairs
            and (max(j, k), min(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue  # chain criterion
        h = lx.reduce(lx.spoly(G[i], G[j], a, b), G, L)
        if not h:
            continue
        h = lx.monic(h)
        hm = lx.lm(h)
        if hm == (0, 0):
            return [BiPoly.const(field, 1)]
        G.append(h)
        L.append(hm)
        k = len(G) - 1
        for r in range(k):
            push(k, r)

    # minimal basis, then interreduce
    keep = [
        idx for idx in range(len(G))
        if not any(
            o != idx and L[o][0] <= L[idx][0] and L[o][1] <= L[idx][1]
            and (L[o] != L[idx] or o < idx)
            for o in range(len(G))
        )
    ]
    Gm = [G[i] for i in keep]
    Lm = [L[i] for i in keep]
    red = []
    for idx, g in enumerate(Gm):
        others = [Gm[o] for o in range(len(Gm)) if o != idx]
        olms = [Lm[o] for o in range(len(Gm)) if o != idx]
        tail = {e: c for e, c in g.items() if e != Lm[idx]}
        r = lx.reduce(tail, others, olms)
        r[Lm[idx]] = field.one
        red.append(r)
    red.sort(key=lambda p: lx.key(lx.lm(p)), reverse=True)
    return [BiPoly(field, p) for p in red]


def _is_unit_basis(basis: list[BiPoly]) -> bool:
    return len(basis) == 1 and set(basis[0].terms) == {(0, 0)}


def eliminant(sys: BivarSystem | Sequence[BiPoly], keep: str) -> UniPoly:
    """Generator of the ideal intersected with k[keep]."""
    order = T_GT_S if keep == "s" else S_GT_T
    basis = lex_groebner_2var(sys, order)
    field = basis[0].field
    if _is_unit_basis(basis):
        return UniPoly(field, [1])
    u = basis[-1].univariate(keep)
    if u is None:
        raise NotZeroDimensional(f"no eliminant in {keep}")
    return u.monic()


def is_zero_dimensional(sys: BivarSystem | Sequence[BiPoly]) -> bool:
    try:
        eliminant(sys, "s")
        eliminant(sys, "t")
    except NotZeroDimensional:
        return False
    return True


def count_solutions(sys: BivarSystem, rng, retries: int = 4, box: int = 1000) -> SolutionCount:
    """Count distinct closure solutions (P) and distinct s / t coordinates (S, T).

    A shear can only merge solutions, never split them, so the largest count seen
    is the true P; it is certified once two independent shears reach it.
    """
    field = sys.field
    S = distinct_root_count(eliminant(sys, "s"))
    T = distinct_root_count(eliminant(sys, "t"))
    if S == 0 or T == 0:
        return SolutionCount(0, 0, 0, (), True)
    if S == 1 or T == 1:
        # one coordinate is constant on the solution set: no shear needed
        return SolutionCount(max(S, T), S, T, (), True)
    seen: list[tuple] = []
    for _ in range(2 + retries):
        lam = field.random_element(rng, avoid=(0,), integral=True, box=box)
        sheared = [g.substitute_linear([[1, field.neg(lam)], [0, 1]]) for g in sys.generators]
        P = distinct_root_count(eliminant(sheared, "s"))
        seen.append((lam, P))
        best = max(c for _, c in seen)
        hits = list(dict.fromkeys(l for l, c in seen if c == best))
        if len(hits) >= 2 and max(S, T) <= best <= S * T:
            return SolutionCount(best, S, T, tuple(hits[:2]), True, tuple(seen))
    raise ShearDisagreement(f"shear counts never certified: {[c for _, c in seen]}")
