"""Brute-force oracle over finite fields.

Everything here is computed by enumerating rational points, with no algebra
shared with the exact path: point tables of X and Y over F_q, all join lines
through pairs of table points, and counts of the points they cover.  The
oracle only sees F_q-rational structure, so its census matches the exact one
only when the relevant points are forced to be rational (see
:func:`oracle_census`).

Dimension estimates count covered points N over F_q.  Over Q the growth
N ~ c p^d across several primes gives d; over a fixed F_p the points are
counted over the smallest F_{p^k} with at least ``q_min`` elements and
d = round(log N / log q), which is a heuristic.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterable, Sequence

from .errors import EnumerationBudgetExceeded, FieldMismatch, NoJoinLineThroughZ, OracleInconclusive
from .fields import is_prime

DEFAULT_BUDGET = 10**7
MAX_PRIME = 101
MAX_EXTENSION_SIZE = 256
# extension size used when a prime field alone is too small to sample from
EXTENSION_Q_MIN = 16


class GF:
    """F_q with q = p^k.  Elements are ints whose base-p digits are the
    coefficients of a polynomial reduced modulo a fixed irreducible."""

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise FieldMismatch(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.p, self.k = p, k
        self.q = p**k
        if k > 1:
            if self.q > MAX_EXTENSION_SIZE:
                raise EnumerationBudgetExceeded(f"F_{p}^{k} is larger than {MAX_EXTENSION_SIZE}")
            self._build_tables()

    # -- construction of F_{p^k}
    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, d: Sequence[int]) -> int:
        return sum(c * self.p**i for i, c in enumerate(d))

    def _polymulmod(self, a: list[int], b: list[int], modulus: list[int]) -> list[int]:
        p, k = self.p, self.k
        prod_ = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod_[i + j] = (prod_[i + j] + x * y) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod_[deg]
            if c:
                for i in range(k + 1):
                    prod_[deg - k + i] = (prod_[deg - k + i] - c * modulus[i]) % p
        return prod_[:k]

    def _irreducible(self) -> list[int]:
        p, k = self.p, self.k
        for tail in product(range(p), repeat=k):
            if tail[0] == 0:
                continue
            f = list(tail) + [1]  # monic, low -> high
            if not any(self._has_factor(f, d) for d in range(1, k // 2 + 1)):
                return f
        raise RuntimeError("no irreducible polynomial found")

    def _has_factor(self, f: list[int], d: int) -> bool:
        p = self.p
        for tail in product(range(p), repeat=d):
            g = list(tail) + [1]
            r = list(f)
            for deg in range(len(r) - 1, d - 1, -1):
                c = r[deg]
                if c:
                    for i in range(d + 1):
                        r[deg - d + i] = (r[deg - d + i] - c * g[i]) % p
            if not any(r[:d]):
                return True
        return False

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        mod = self._irreducible()
        self.modulus = mod
        for g in range(p, q):
            exp = [1]
            x = self._digits(1)
            gd = self._digits(g)
            for _ in range(q - 2):
                x = self._polymulmod(x, gd, mod)
                exp.append(self._undigits(x))
            if len(set(exp)) == q - 1:
                break
        else:
            raise RuntimeError("no primitive element found")
        self._exp = exp + exp
        self._log = {v: i for i, v in enumerate(exp)}
        digits = [self._digits(a) for a in range(q)]
        self._add = [
            [self._undigits([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q)]
            for a in range(q)
        ]
        self._neg = [self._undigits([(-x) % p for x in digits[a]]) for a in range(q)]

    # -- arithmetic
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p if self.k == 1 else self._add[a][b]

    def neg(self, a: int) -> int:
        return (-a) % self.p if self.k == 1 else self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def power(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if self.k == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def embed(self, c: int) -> int:
        """Image of an element of the prime field."""
        return c % self.p

    def elements(self) -> range:
        return range(self.q)

    # -- vectors
    def normalize(self, v: Sequence[int]) -> tuple | None:
        lead = next((x for x in v if x), None)
        if lead is None:
            return None
        inv = self.inv(lead)
        return tuple(self.mul(inv, x) for x in v)

    def rank(self, rows: Iterable[Sequence[int]]) -> int:
        A = [list(r) for r in rows]
        r = 0
        ncols = len(A[0]) if A else 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(A)) if A[i][c]), None)
            if piv is None:
                continue
            A[r], A[piv] = A[piv], A[r]
            inv = self.inv(A[r][c])
            A[r] = [self.mul(inv, x) for x in A[r]]
            for i in range(len(A)):
                if i != r and A[i][c]:
                    m = A[i][c]
                    A[i] = [self.sub(x, self.mul(m, y)) for x, y in zip(A[i], A[r])]
            r += 1
            if r == len(A):
                break
        return r

    def combo(self, a: int, u: Sequence[int], b: int, v: Sequence[int]) -> list[int]:
        return [self.add(self.mul(a, x), self.mul(b, y)) for x, y in zip(u, v)]

    def projective_points(self, n: int) -> Iterable[tuple]:
        """All points of P^n(F_q), normalized (first nonzero coordinate 1)."""
        for lead in range(n + 1):
            for rest in product(range(self.q), repeat=n - lead):
                yield (0,) * lead + (1,) + rest

    def plucker_key(self, u: Sequence[int], v: Sequence[int]) -> tuple:
        m = len(u)
        coords = [
            self.sub(self.mul(u[i], v[j]), self.mul(u[j], v[i]))
            for i in range(m)
            for j in range(i + 1, m)
        ]
        return self.normalize(coords)


def extension_for(p: int, q_min: int) -> GF:
    """Smallest F_{p^k} with at least q_min elements."""
    k = 1
    while p**k < q_min:
        k += 1
    return GF(p, k)


# ---------------------------------------------------------------------------
# point tables


def _prime_of(V) -> int:
    p = V.field.char
    if p == 0:
        raise FieldMismatch("reduce the variety modulo a prime first")
    return p


@dataclass
class PointTable:
    gf: GF
    points: list[tuple]
    params: dict[tuple, list[tuple]]
    index: set = dc_field(default_factory=set)

    def __post_init__(self):
        self.index = set(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, pt) -> bool:
        return pt in self.index


def _form_evaluator(gf: GF, form):
    terms = [(gf.embed(c), e) for e, c in form.terms.items()]

    def ev(pt):
        acc = 0
        for c, e in terms:
            m = c
            for x, k in zip(pt, e):
                if k:
                    m = gf.mul(m, gf.power(x, k))
            acc = gf.add(acc, m)
        return acc

    return ev


def enumerate_points(
    V, gf: GF | None = None, budget: int = DEFAULT_BUDGET, max_prime: int = MAX_PRIME
) -> PointTable:
    """Image of P^k(F_q) under the parametrization (base points skipped)."""
    p = _prime_of(V)
    gf = gf or GF(p)
    if gf.p != p:
        raise FieldMismatch(f"variety over F_{p}, table requested over F_{gf.q}")
    if p > max_prime:
        raise EnumerationBudgetExceeded(f"p = {p} is above the enumeration cap {max_prime}")
    size = sum(gf.q**i for i in range(V.k + 1))
    if size > budget:
        raise EnumerationBudgetExceeded(f"{size} parameters exceed the budget {budget}")
    evs = [_form_evaluator(gf, f) for f in V.forms]
    params: dict[tuple, list[tuple]] = {}
    for s in gf.projective_points(V.k):
        pt = gf.normalize([ev(s) for ev in evs])
        if pt is not None:
            params.setdefault(pt, []).append(s)
    return PointTable(gf, list(params), params)


def _tangent_lines(V, table: PointTable) -> list[tuple[tuple, tuple]]:
    """Tangent lines at table points of a curve, as spanning pairs."""
    gf = table.gf
    if V.k != 1:
        return []
    derivs = [[_form_evaluator(gf, f.derivative(i)) for f in V.forms] for i in range(2)]
    out = []
    for pt, params in table.params.items():
        s = params[0]
        rows = [list(pt)] + [[ev(s) for ev in d] for d in derivs]
        if gf.rank(rows) != 2:
            continue
        for r in rows[1:]:
            if gf.rank([pt, r]) == 2:
                out.append((pt, tuple(r)))
                break
    return out


# ---------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class OracleCensus:
    z: tuple
    b: int
    P: int
    S: int
    T: int
    profiles: tuple
    general: bool = True

    @property
    def profile(self) -> tuple[int, int] | None:
        kinds = set(self.profiles)
        return next(iter(kinds)) if len(kinds) == 1 else None

    def to_json(self) -> dict:
        prof = self.profile
        return {
            "z": list(self.z),
            "b": self.b,
            "P": self.P,
            "S": self.S,
            "T": self.T,
            "m_X": None if prof is None else prof[0],
            "m_Y": None if prof is None else prof[1],
            "profiles": [list(p) for p in self.profiles],
            "general": self.general,
        }


def oracle_census(Xt: PointTable, Yt: PointTable, z: Sequence[int], budget: int = DEFAULT_BUDGET) -> OracleCensus:
    """Join lines through z spanned by rational pairs, with rational points counted.

    The counts agree with the census over the closure when every point of X
    and Y on every join line through z is rational over the table field.  This
    is automatic for a line through z when, e.g., m <= 2 and b = 1, or the
    profile is (1, 1) and b <= 2.
    """
    gf = Xt.gf
    if len(Xt) * len(Yt) > budget:
        raise EnumerationBudgetExceeded(f"{len(Xt)} x {len(Yt)} pairs exceed the budget {budget}")
    z = gf.normalize(z)
    general = z not in Xt and z not in Yt
    lines: dict[tuple, tuple] = {}
    for x in Xt.points:
        for y in Yt.points:
            if y == x:
                continue
            if gf.rank([x, y, z]) == 2:
                key = gf.plucker_key(x, y)
                lines.setdefault(key, (x, y))
    profiles = []
    P = S = T = 0
    for key, (x, y) in sorted(lines.items()):
        mx, my = _line_profile(gf, Xt, Yt, x, y)
        profiles.append((mx, my))
        P += mx * my
        S += mx
        T += my
    if not lines:
        raise NoJoinLineThroughZ(f"no F_{gf.q}-rational join line through {z}")
    return OracleCensus(z, len(lines), P, S, T, tuple(profiles), general)


def _line_profile(gf: GF, Xt: PointTable, Yt: PointTable, x, y) -> tuple[int, int]:
    mx = sum(1 for w in Xt.points if gf.rank([x, y, w]) == 2)
    my = sum(1 for w in Yt.points if gf.rank([x, y, w]) == 2)
    return mx, my


def generic_line_profile(Xt: PointTable, Yt: PointTable, rng, samples: int = 60) -> tuple[int, int]:
    """Most common (m_X, m_Y) over lines through random rational pairs x != y."""
    gf = Xt.gf
    seen: Counter = Counter()
    for _ in range(samples * 10):
        x, y = rng.choice(Xt.points), rng.choice(Yt.points)
        if x == y:
            continue
        seen[_line_profile(gf, Xt, Yt, x, y)] += 1
        if sum(seen.values()) == samples:
            break
    if not seen:
        raise OracleInconclusive("no rational pair x != y to sample join lines from")
    return seen.most_common(1)[0][0]


def _candidate_points(Xt: PointTable, Yt: PointTable, rng, tries: int):
    """Points z = a x + b y on lines through rational pairs, off X and Y, without repeats."""
    gf = Xt.gf
    seen: set = set()
    for _ in range(tries):
        x = rng.choice(Xt.points)
        y = rng.choice(Yt.points)
        if x == y or gf.q < 3:
            continue
        a = rng.randrange(1, gf.q)
        b = rng.randrange(1, gf.q)
        z = gf.normalize(gf.combo(a, x, b, y))
        if z is None or z in Xt or z in Yt or z in seen:
            continue
        seen.add(z)
        yield z


def sample_oracle_points(Xt: PointTable, Yt: PointTable, rng, count: int, tries: int = 1000) -> list[tuple]:
    """``count`` distinct points z = a x + b y off X and Y (no genericity test beyond that)."""
    out = []
    for z in _candidate_points(Xt, Yt, rng, tries):
        out.append(z)
        if len(out) == count:
            return out
    raise OracleInconclusive(f"only {len(out)} points found over F_{Xt.gf.q}")


def _census_key(c: OracleCensus) -> tuple:
    return (c.b, c.P, c.S, c.T, tuple(sorted(c.profiles)))


def general_censuses(
    Xt: PointTable, Yt: PointTable, rng, count: int, budget: int = DEFAULT_BUDGET, tries: int = 2000
) -> tuple[list[OracleCensus], dict]:
    """Censuses at ``count`` general points, with a record of what was rejected.

    Candidates off X and Y are first screened line by line: every join line
    through z must have the generic profile (this drops points on secants of
    excess contact, tangents and the like).  Special points whose lines all
    look generic, such as branch points of the map to the lines, are dropped
    by taking the census value shared by a strict majority of a pool of
    3 * ``count`` screened points; special loci have density O(1/q).
    """
    generic = generic_line_profile(Xt, Yt, rng)
    pool: list[OracleCensus] = []
    screened_out = 0
    for z in _candidate_points(Xt, Yt, rng, tries):
        c = oracle_census(Xt, Yt, z, budget)
        if all(p == generic for p in c.profiles):
            pool.append(c)
            if len(pool) == 3 * count:
                break
        else:
            screened_out += 1
    if len(pool) < count:
        raise OracleInconclusive(
            f"only {len(pool)} screened points over F_{Xt.gf.q} ({screened_out} on special join lines)"
        )
    tally = Counter(_census_key(c) for c in pool)
    key, freq = tally.most_common(1)[0]
    if 2 * freq <= len(pool) or freq < count:
        raise OracleInconclusive(f"no majority census value over F_{Xt.gf.q}: {dict(tally)}")
    chosen = [c for c in pool if _census_key(c) == key][:count]
    stats = {
        "generic_line_profile": list(generic),
        "pool": len(pool),
        "screened_out": screened_out,
        "minority": len(pool) - freq,
    }
    return chosen, stats


# ---------------------------------------------------------------------------
# covered points, dimension, degree


def covered_points(inst, gf: GF, budget: int = DEFAULT_BUDGET) -> set:
    """Rational points on join lines of rational pairs (plus tangent lines when X = Y)."""
    Xt = enumerate_points(inst.X, gf, budget)
    Yt = Xt if inst.same_forms else enumerate_points(inst.Y, gf, budget)
    if len(Xt) * len(Yt) > budget:
        raise EnumerationBudgetExceeded(f"{len(Xt)} x {len(Yt)} pairs exceed the budget {budget}")
    spans: dict[tuple, tuple] = {}
    for x in Xt.points:
        for y in Yt.points:
            if x != y:
                spans.setdefault(gf.plucker_key(x, y), (x, y))
    if inst.same_forms:
        for u, v in _tangent_lines(inst.X, Xt):
            spans.setdefault(gf.plucker_key(u, v), (u, v))
    covered = set(Xt.points) | set(Yt.points)
    weights = [(1, 0)] + [(a, 1) for a in gf.elements()]
    for u, v in spans.values():
        for a, b in weights:
            covered.add(gf.normalize(gf.combo(a, u, b, v)))
    return covered


@dataclass(frozen=True)
class OracleDimension:
    dim: int
    method: str
    heuristic: bool
    counts: dict

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "method": self.method,
            "heuristic": self.heuristic,
            "counts": {str(k): v for k, v in self.counts.items()},
        }


def _instance_mod(inst, p: int):
    if inst.field.char == 0:
        return inst.reduce_mod(p)
    if inst.field.char != p:
        raise FieldMismatch(f"instance over F_{inst.field.char}, oracle asked for F_{p}")
    return inst


def oracle_dimension(
    inst, primes: Sequence[int], budget: int = DEFAULT_BUDGET, q_min: int = EXTENSION_Q_MIN
) -> OracleDimension:
    """dim EJ from covered-point counts.

    Several primes: d = round(log(N2/N1) / log(p2/p1)) for consecutive primes,
    and all estimates must agree.  One prime: d = round(log N / log q) over the
    smallest F_{p^k} with q >= q_min (heuristic).
    """
    primes = sorted(set(primes))
    if not primes:
        raise ValueError("need at least one prime")
    if len(primes) == 1:
        p = primes[0]
        gf = extension_for(p, q_min)
        N = len(covered_points(_instance_mod(inst, p), gf, budget))
        d = min(inst.n, max(0, round(math.log(N) / math.log(gf.q))))
        return OracleDimension(d, "single-field", True, {gf.q: N})
    counts = {p: len(covered_points(_instance_mod(inst, p), GF(p), budget)) for p in primes}
    ests = []
    for p1, p2 in zip(primes, primes[1:]):
        ests.append(round(math.log(counts[p2] / counts[p1]) / math.log(p2 / p1)))
    if len(set(ests)) != 1:
        raise OracleInconclusive(f"growth estimates disagree: {ests} from counts {counts}")
    d = min(inst.n, max(0, ests[0]))
    return OracleDimension(d, "growth", False, counts)


def _subspace_points(gf: GF, basis: list[list[int]]) -> Iterable[tuple]:
    for c in gf.projective_points(len(basis) - 1):
        v = [0] * len(basis[0])
        for ci, row in zip(c, basis):
            if ci:
                v = [gf.add(x, gf.mul(ci, y)) for x, y in zip(v, row)]
        yield gf.normalize(v)


def oracle_degree_slice(
    inst, p: int, dim: int, trials: int = 200, rng=None, budget: int = DEFAULT_BUDGET, q_min: int = 0
) -> int:
    """Max over random codim-``dim`` slices of covered rational points on the slice.

    A lower bound for deg EJ that equals it once some slice meets EJ in
    rational points only.  Points are taken over the smallest F_{p^k} with at
    least ``q_min`` elements (F_p by default).
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if dim == inst.n:
        return 1
    rng = rng or random.Random(0)
    gf = extension_for(p, q_min)
    covered = covered_points(_instance_mod(inst, p), gf, budget)
    n1 = inst.n + 1
    k = n1 - dim
    best = 0
    for _ in range(trials):
        while True:
            basis = [[rng.randrange(gf.q) for _ in range(n1)] for _ in range(k)]
            if gf.rank(basis) == k:
                break
        best = max(best, sum(1 for pt in _subspace_points(gf, basis) if pt in covered))
    return best
