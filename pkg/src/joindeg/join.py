"""Join invariants of two parametrized varieties X, Y in P^n.

The ruled join RJ(X,Y) in P^{2n+1} maps onto the embedded join EJ(X,Y) in P^n by
projection from {a_i = b_i}.  Everything below is computed from incidence counts
at sampled general points:

* the join-type profile (m_X, m_Y): points of X and Y on a general join line;
* the fiber census at a general z in EJ: P ordered pairs (x, y) on join lines
  through z, S distinct x's, T distinct y's, giving b = S / m_X lines;
* tangent-space data: Terracini spans, t(X,Y), strange and constrained pairs.

"General" means: avoids the testable bad sets (singular points, tangency, excess
intersection, lines inside X or Y) and agrees across independent seeded trials.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Sequence

from .bivar import BivarSystem, SolutionCount, count_solutions
from .errors import (
    CensusIdentityViolation,
    ChartFailure,
    CheckFailure,
    CoincidentSample,
    GeneralPositionUncertain,
    InvalidInstance,
    JoinDefective,
    JoinDegError,
    LineInsideVariety,
    NonIntegralRatio,
    NotZeroDimensional,
    PreconditionError,
    ShearDisagreement,
    SingularParameter,
    TrialDisagreement,
    ZeroWeights,
)
from .fields import BACKUP_PRIMES, SURROGATE_PRIMES, Field
from .poly import BiPoly, HomPoly, UniPoly, linear_combination
from .projective import (
    LinearSubspace,
    ProjLine,
    ProjPoint,
    intersect,
    line_through,
    nullspace,
    random_invertible,
    random_subspace,
    rank,
    span_of,
)
from .variety import (
    ParamVariety,
    binary_common_zeros,
    contains_point,
    line_intersection_profile,
    plane_section_count,
    sample_param,
    tangent_space,
)


def derive_seed(seed: int, name: str) -> int:
    """Stable per-section seed (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def section_rng(seed: int, name: str) -> random.Random:
    return random.Random(derive_seed(seed, name))


# ---------------------------------------------------------------------------
# instance


def _linear_image(V: ParamVariety) -> LinearSubspace:
    if V.k == 0:
        return LinearSubspace(V.field, V.n, [V.evaluate((V.field.one,))])
    cols = []
    for i in range(V.k + 1):
        e = tuple(int(j == i) for j in range(V.k + 1))
        cols.append([f.terms.get(e, V.field.zero) for f in V.forms])
    return LinearSubspace(V.field, V.n, cols)


@dataclass(frozen=True, eq=False)
class JoinInstance:
    X: ParamVariety
    Y: ParamVariety
    seed: int = 0
    trials: int = 3
    sample_box: int = 1000
    name: str = ""
    arithmetic: str = "modular"

    def __post_init__(self):
        if self.arithmetic not in ("modular", "exact"):
            raise InvalidInstance(f"arithmetic must be 'modular' or 'exact', got {self.arithmetic!r}")
        if self.X.field != self.Y.field:
            raise InvalidInstance(f"X over {self.X.field}, Y over {self.Y.field}")
        if self.X.n != self.Y.n:
            raise InvalidInstance(f"X in P^{self.X.n}, Y in P^{self.Y.n}")
        if self.trials < 1:
            raise InvalidInstance("trials must be >= 1")
        if self.X.is_linear and self.Y.is_linear and _linear_image(self.X) == _linear_image(self.Y):
            raise InvalidInstance("X = Y is a linear space; the join is excluded")

    @property
    def field(self) -> Field:
        return self.X.field

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def same_forms(self) -> bool:
        return self.X.same_forms(self.Y)

    @property
    def expected_dim(self) -> int:
        return self.X.k + self.Y.k + 1

    def rng(self, name: str) -> random.Random:
        return section_rng(self.seed, name)

    def reduce_mod(self, p: int) -> "JoinInstance":
        return replace(self, X=self.X.reduce_mod(p), Y=self.Y.reduce_mod(p))

    def swapped(self) -> "JoinInstance":
        return replace(self, X=self.Y, Y=self.X)


# ---------------------------------------------------------------------------
# census record


@dataclass(frozen=True)
class FiberCensus:
    """Counted incidence data at a general point z of EJ(X,Y).

    P ordered pairs (x, y) with x on X, y on Y, both on one join line through z;
    S distinct x's, T distinct y's.  With b lines through z the identities
    S = m_X b, T = m_Y b, P = m_X m_Y b must hold.
    """

    P: int
    S: int
    T: int
    m_X: int
    m_Y: int
    b: int
    z: ProjPoint | None = None
    pairs_offdiagonal: int | None = None
    trials: int = 1

    @classmethod
    def from_counts(cls, P: int, S: int, T: int, m_X: int, m_Y: int, **extra) -> "FiberCensus":
        if m_X < 1 or m_Y < 1:
            raise CensusIdentityViolation(f"profile ({m_X}, {m_Y}) must be positive")
        if S % m_X:
            raise NonIntegralRatio(f"S/m_X = {S}/{m_X} is not an integer")
        b = S // m_X
        if b < 1:
            raise CensusIdentityViolation("no join line through z")
        if T != m_Y * b or P != m_X * m_Y * b:
            raise CensusIdentityViolation(
                f"P={P}, S={S}, T={T} violate the identities for m=({m_X},{m_Y}), b={b}"
            )
        return cls(P, S, T, m_X, m_Y, b, **extra)

    @classmethod
    def from_profile(cls, m_X: int, m_Y: int, b: int) -> "FiberCensus":
        return cls.from_counts(m_X * m_Y * b, m_X * b, m_Y * b, m_X, m_Y)

    @property
    def deg_beta(self) -> int:
        return self.b

    @property
    def deg_alpha_X(self) -> int:
        return self.S

    @property
    def deg_alpha_Y(self) -> int:
        return self.T

    @property
    def deg_pi(self) -> int:
        return self.P

    def key(self) -> tuple:
        return (self.P, self.S, self.T, self.m_X, self.m_Y, self.b)

    def to_json(self) -> dict:
        return {
            "P": self.P,
            "S": self.S,
            "T": self.T,
            "m_X": self.m_X,
            "m_Y": self.m_Y,
            "b": self.b,
            "deg_beta": self.deg_beta,
            "deg_alpha_X": self.deg_alpha_X,
            "deg_alpha_Y": self.deg_alpha_Y,
            "deg_pi": self.deg_pi,
            "pairs_offdiagonal": self.pairs_offdiagonal,
            "trials": self.trials,
            "z": None if self.z is None else [self.z.field.format(c) for c in self.z.coords],
        }


# ---------------------------------------------------------------------------
# join lines


@dataclass(frozen=True)
class JoinLineSample:
    x_param: tuple
    y_param: tuple
    x: ProjPoint
    y: ProjPoint
    line: ProjLine
    certificate: dict


def _profile_or_none(V: ParamVariety, L: ProjLine, rng):
    if V.k > 1:
        return None
    return line_intersection_profile(V, L, rng)


def sample_join_line(inst: JoinInstance, rng, retries: int = 25) -> JoinLineSample:
    """Random x in X, y in Y and the certified join line through them."""
    X, Y = inst.X, inst.Y
    last = None
    for _ in range(retries):
        xp = sample_param(X, rng, inst.sample_box)
        yp = sample_param(Y, rng, inst.sample_box)
        x, y = X.point(xp), Y.point(yp)
        if x == y:
            last = CoincidentSample(f"sampled x = y = {x}")
            continue
        L = line_through(x, y)
        try:
            tangent_space(X, xp)
            tangent_space(Y, yp)
            px = _profile_or_none(X, L, rng)
            py = _profile_or_none(Y, L, rng)
        except SingularParameter as exc:
            last = exc
            continue
        except LineInsideVariety as exc:
            last = exc
            continue
        if (px is not None and not px[1]) or (py is not None and not py[1]):
            last = GeneralPositionUncertain(f"non-transversal join line {L}")
            continue
        cert = {
            "smooth": True,
            "transversal": True,
            "inside_X_or_Y": False,
            "profile_X": None if px is None else px[0],
            "profile_Y": None if py is None else py[0],
        }
        return JoinLineSample(xp, yp, x, y, L, cert)
    raise GeneralPositionUncertain(f"no certified join line after {retries} samples ({last})")


def joined_profile(inst: JoinInstance, rng) -> tuple[int, int]:
    """(m_X, m_Y): points of X and Y on a general join line, agreed across trials."""
    if inst.X.k > 1 or inst.Y.k > 1:
        raise PreconditionError("exact profiles need dim X, dim Y <= 1")
    _require_sampling_room(inst, "the joined profile")
    seen = []
    for _ in range(inst.trials):
        s = sample_join_line(inst, rng)
        seen.append((s.certificate["profile_X"], s.certificate["profile_Y"]))
    if len(set(seen)) != 1:
        raise TrialDisagreement(f"profiles disagree across trials: {seen}")
    return seen[0]


# ---------------------------------------------------------------------------
# pair systems: rank [A x(s); A y(t)] <= 1 in affine source charts


def _div_s_minus_t(p: BiPoly) -> BiPoly | None:
    """Exact quotient p / (s - t), or None if (s - t) does not divide p."""
    f = p.field
    if p.is_zero():
        return p
    top = max(a for a, _ in p.terms)
    coeff = [dict() for _ in range(top + 1)]  # coeff[a] = poly in t
    for (a, b), c in p.terms.items():
        coeff[a][b] = c

    def add(u: dict, v: dict) -> dict:
        out = dict(u)
        for k, c in v.items():
            nv = f.add(out.get(k, f.zero), c)
            if f.is_zero(nv):
                out.pop(k, None)
            else:
                out[k] = nv
        return out

    def times_t(u: dict) -> dict:
        return {k + 1: c for k, c in u.items()}

    q = [dict() for _ in range(top)]
    carry: dict = {}
    for a in range(top, 0, -1):
        carry = add(coeff[a], times_t(carry)) if a != top else dict(coeff[a])
        q[a - 1] = carry
    rem = add(coeff[0], times_t(carry)) if top > 0 else coeff[0]
    if rem:
        return None
    return BiPoly(f, {(a, b): c for a, poly in enumerate(q) for b, c in poly.items()})


def _strip_diagonal(gens: list[BiPoly]) -> list[BiPoly]:
    gens = [g for g in gens if not g.is_zero()]
    while gens:
        quots = [_div_s_minus_t(g) for g in gens]
        if any(q is None for q in quots):
            break
        gens = quots
    return gens


def _strip_x1(forms: list[HomPoly]) -> list[HomPoly]:
    """Remove the largest common power of the second variable from binary forms."""
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        return forms
    k = min(min(e[1] for e in f.terms) for f in forms)
    if k == 0:
        return forms
    return [HomPoly(f.field, 2, {(a, b - k): c for (a, b), c in f.terms.items()}, f.degree - k) for f in forms]


@dataclass(frozen=True)
class _Charts:
    MX: list | None
    MY: list | None


def _sample_charts(inst: JoinInstance, rng) -> _Charts:
    f = inst.field
    MX = random_invertible(f, 2, rng, inst.sample_box) if inst.X.k == 1 else None
    if inst.same_forms:
        MY = MX
    else:
        MY = random_invertible(f, 2, rng, inst.sample_box) if inst.Y.k == 1 else None
    return _Charts(MX, MY)


def _charted(V: ParamVariety, M) -> list[HomPoly]:
    return list(V.forms) if M is None else [g.substitute_linear(M) for g in V.forms]


def _apply(A: Sequence[Sequence], forms: list[HomPoly]) -> list[HomPoly]:
    return [linear_combination(forms, row) for row in A]


def _uni(form: HomPoly) -> UniPoly:
    if form.nvars == 1:
        return UniPoly(form.field, [form.terms.get((0,), form.field.zero)])
    return form.to_uni()


def _pair_generators(inst: JoinInstance, A, charts: _Charts) -> list[BiPoly]:
    u = [_uni(g) for g in _apply(A, _charted(inst.X, charts.MX))]
    v = [_uni(g) for g in _apply(A, _charted(inst.Y, charts.MY))]
    gens = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            m = BiPoly.from_uni(u[i], "s") * BiPoly.from_uni(v[j], "t") - BiPoly.from_uni(
                u[j], "s"
            ) * BiPoly.from_uni(v[i], "t")
            if not m.is_zero():
                gens.append(m)
    if inst.same_forms:
        gens = _strip_diagonal(gens)
    f = inst.field
    if inst.X.k == 0:
        gens.append(BiPoly.s(f))
    if inst.Y.k == 0:
        gens.append(BiPoly.t(f))
    return gens


def _infinity_clean(inst: JoinInstance, A, charts: _Charts) -> bool:
    """True when no solution of the pair system uses a source parameter at infinity."""
    f = inst.field
    checks = []
    if inst.X.k == 1:
        checks.append((inst.X, charts.MX, inst.Y, charts.MY))
    if inst.Y.k == 1:
        checks.append((inst.Y, charts.MY, inst.X, charts.MX))
    for V, MV, W, MW in checks:
        vinf = [g.evaluate((f.one, f.zero)) for g in _apply(A, _charted(V, MV))]
        wforms = _apply(A, _charted(W, MW))
        if W.k == 0:
            w = [g.terms.get((0,), f.zero) for g in wforms]
            minors = [
                f.sub(f.mul(vinf[i], w[j]), f.mul(vinf[j], w[i]))
                for i in range(len(A))
                for j in range(i + 1, len(A))
            ]
            if all(f.is_zero(m) for m in minors):
                return False
            continue
        forms = [
            wforms[j].scale(vinf[i]) - wforms[i].scale(vinf[j])
            for i in range(len(A))
            for j in range(i + 1, len(A))
        ]
        if inst.same_forms:
            forms = _strip_x1(forms)
        z = binary_common_zeros(forms)
        if z is None or z.count:
            return False
    return True


def _count_once(gens: list[BiPoly], provenance: str, rng) -> SolutionCount:
    nz = [g for g in gens if not g.is_zero()]
    if any(set(g.terms) == {(0, 0)} for g in nz):
        return SolutionCount(0, 0, 0, (), True)
    if len(nz) < 2:
        raise NotZeroDimensional("fewer than two independent equations")
    return count_solutions(BivarSystem(tuple(nz), provenance), rng)


def _count_pairs(inst: JoinInstance, gens: list[BiPoly], provenance: str, rng) -> SolutionCount:
    """Solution counts; over Q in modular mode the system is solved modulo two
    large primes and the counts must agree (a bad prime would have to divide
    one of finitely many nonzero integers attached to the system)."""
    if inst.field.char != 0 or inst.arithmetic == "exact":
        return _count_once(gens, provenance, rng)
    counts = []
    for p in SURROGATE_PRIMES + BACKUP_PRIMES:
        try:
            reduced = [g.reduce_mod(p) for g in gens]
        except ZeroDivisionError:
            continue  # p divides a denominator
        counts.append(_count_once(reduced, provenance, rng))
        if len(counts) == 2:
            break
    a, b = counts
    if (a.P, a.S, a.T) != (b.P, b.S, b.T):
        raise TrialDisagreement(f"modular counts disagree: {(a.P, a.S, a.T)} vs {(b.P, b.S, b.T)}")
    return a


@dataclass(frozen=True)
class PairCount:
    P: int
    S: int
    T: int
    raw: SolutionCount
    coincidences: SolutionCount | None


def _solve_pair_system(inst: JoinInstance, A, rng, provenance: str, chart_tries: int = 12) -> PairCount:
    """Distinct off-diagonal pairs (s, t) with rank [A x(s); A y(t)] <= 1.

    Pairs with x(s) = y(t) satisfy the rank condition for every A; they are
    counted separately (A = identity) and subtracted.
    """
    ident = [[int(i == j) for j in range(inst.n + 1)] for i in range(inst.n + 1)]
    for _ in range(chart_tries):
        charts = _sample_charts(inst, rng)
        if not _infinity_clean(inst, A, charts) or not _infinity_clean(inst, ident, charts):
            continue
        raw = _count_pairs(inst, _pair_generators(inst, A, charts), provenance, rng)
        coinc = _count_pairs(inst, _pair_generators(inst, ident, charts), "other", rng)
        return PairCount(raw.P - coinc.P, raw.S - coinc.S, raw.T - coinc.T, raw, coinc)
    raise ChartFailure(f"no clean affine chart after {chart_tries} coordinate changes")


def _projection_forms(inst: JoinInstance, z: ProjPoint, rng) -> list[list]:
    """n independent linear forms vanishing at z, randomly mixed."""
    ann = nullspace([list(z.coords)], inst.field, inst.n + 1)
    M = random_invertible(inst.field, len(ann), rng, inst.sample_box)
    f = inst.field
    return [[f.dot(row, col) for col in zip(*ann)] for row in M]


def collinearity_system(inst: JoinInstance, z: ProjPoint, rng, chart_tries: int = 12) -> BivarSystem:
    """Pairs (x(s), y(t)) collinear with z, in clean affine charts.

    The system says that x and y have the same image under projection from z,
    i.e. the 2x2 minors of [A x(s); A y(t)] vanish for forms A cutting out z.
    """
    if inst.X.k > 1 or inst.Y.k > 1:
        raise PreconditionError("collinearity systems need dim X, dim Y <= 1")
    A = _projection_forms(inst, z, rng)
    ident = [[int(i == j) for j in range(inst.n + 1)] for i in range(inst.n + 1)]
    for _ in range(chart_tries):
        charts = _sample_charts(inst, rng)
        if _infinity_clean(inst, A, charts) and _infinity_clean(inst, ident, charts):
            gens = [g for g in _pair_generators(inst, A, charts) if not g.is_zero()]
            if len(gens) < 2:
                raise NotZeroDimensional("fewer than two independent equations")
            return BivarSystem(tuple(gens), "collinearity")
    raise ChartFailure(f"no clean affine chart after {chart_tries} coordinate changes")


# ---------------------------------------------------------------------------
# tangent-space invariants


def terracini_span(inst: JoinInstance, x_param, y_param) -> tuple[LinearSubspace, int]:
    TX = tangent_space(inst.X, x_param).space
    TY = tangent_space(inst.Y, y_param).space
    S = span_of([TX, TY])
    return S, S.dim


def _smooth_pair(inst: JoinInstance, rng, tries: int = 50) -> tuple[tuple, tuple]:
    for _ in range(tries):
        xp = sample_param(inst.X, rng, inst.sample_box)
        yp = sample_param(inst.Y, rng, inst.sample_box)
        if inst.X.point(xp) == inst.Y.point(yp):
            continue
        try:
            tangent_space(inst.X, xp)
            tangent_space(inst.Y, yp)
        except SingularParameter:
            continue
        return xp, yp
    raise GeneralPositionUncertain("could not sample a smooth pair x != y")


def terracini_dimension(inst: JoinInstance, rng) -> int:
    """Generic dimension of span(T_X,x, T_Y,y); ranks are lower semicontinuous, so take the max."""
    return max(terracini_span(inst, *_smooth_pair(inst, rng))[1] for _ in range(inst.trials))


def t_invariant(inst: JoinInstance, rng) -> int:
    """Generic dim(T_X,x cap T_Y,y) (-1 when empty), the minimum over sampled pairs."""
    values = []
    for _ in range(inst.trials):
        xp, yp = _smooth_pair(inst, rng)
        values.append(intersect(tangent_space(inst.X, xp).space, tangent_space(inst.Y, yp).space).dim)
    t = min(values)
    if t > min(inst.X.k, inst.Y.k):
        raise CheckFailure(f"t = {t} exceeds min(dim X, dim Y)")
    return t


@dataclass(frozen=True)
class EJDimension:
    dim: int
    method: str
    terracini: int
    heuristic: bool = False
    detail: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "method": self.method,
            "terracini": self.terracini,
            "heuristic": self.heuristic,
            "detail": self.detail,
        }


def ej_dimension(inst: JoinInstance, rng, oracle_budget: int = 10**7) -> EJDimension:
    """dim EJ(X,Y).

    Characteristic 0: the generic Terracini span (equality case of Terracini's
    lemma).  Characteristic p: brute-force point counts, with the Terracini span
    reported as a lower bound.
    """
    terr = terracini_dimension(inst, rng)
    if inst.field.char == 0:
        return EJDimension(terr, "terracini", terr)
    from .oracle import oracle_dimension

    od = oracle_dimension(inst, [inst.field.char], budget=oracle_budget)
    return EJDimension(od.dim, "oracle", terr, od.heuristic, od.to_json())


def constrained_pair_test(inst: JoinInstance, rng, ej_dim: int | None = None, t: int | None = None) -> bool:
    """dim EJ > dim X + dim Y - t(X,Y)."""
    if ej_dim is None:
        ej_dim = ej_dimension(inst, rng).dim
    if t is None:
        t = t_invariant(inst, rng)
    return ej_dim > inst.X.k + inst.Y.k - t


def _tangent_batch(V: ParamVariety, rng, count: int, box: int) -> list[LinearSubspace]:
    out = []
    for _ in range(count * 4):
        try:
            out.append(tangent_space(V, sample_param(V, rng, box)).space)
        except SingularParameter:
            continue
        if len(out) == count:
            break
    return out


def strange_pair_test(
    inst: JoinInstance, rng, batch: int = 25, verify: int = 50, max_rounds: int = 8
) -> tuple[bool, LinearSubspace | None]:
    """Is there a nonempty L inside every tangent space of X and of Y?

    One-sided: a True answer is certified on the sampled points only.
    """

    def fold(current, spaces):
        for T in spaces:
            current = T if current is None else intersect(current, T)
            if current.is_empty():
                break
        return current

    running = fold(None, _tangent_batch(inst.X, rng, batch, inst.sample_box) + _tangent_batch(inst.Y, rng, batch, inst.sample_box))
    if running is None or running.is_empty():
        return False, None
    stable = 0
    for _ in range(max_rounds):
        nxt = fold(running, _tangent_batch(inst.X, rng, batch, inst.sample_box) + _tangent_batch(inst.Y, rng, batch, inst.sample_box))
        if nxt.is_empty():
            return False, None
        stable = stable + 1 if nxt == running else 0
        running = nxt
        if stable >= 2:
            break
    fresh = _tangent_batch(inst.X, rng, verify, inst.sample_box) + _tangent_batch(inst.Y, rng, verify, inst.sample_box)
    if all(T.contains(running) for T in fresh):
        return True, running
    return False, None


def ruled_join_point(inst: JoinInstance, x_param, y_param, a, b) -> ProjPoint:
    """a[x,0] + b[0,y] in P^{2n+1}."""
    f = inst.field
    a, b = f.coerce(a), f.coerce(b)
    if f.is_zero(a) and f.is_zero(b):
        raise ZeroWeights("(a, b) = (0, 0)")
    x = inst.X.evaluate(x_param)
    y = inst.Y.evaluate(y_param)
    return ProjPoint(f, [f.mul(a, c) for c in x] + [f.mul(b, c) for c in y])


# ---------------------------------------------------------------------------
# census and degree


# Below this many field elements random samples are too often special
# (tangency points, bad charts, colliding shears) to certify general position.
MIN_SAMPLING_FIELD = 11


def _require_sampling_room(inst: JoinInstance, what: str) -> None:
    c = inst.field.char
    if 0 < c < MIN_SAMPLING_FIELD:
        raise PreconditionError(f"{what} needs at least {MIN_SAMPLING_FIELD} field elements; F_{c} is too small (use the oracle)")


def _require_curves(inst: JoinInstance, what: str) -> None:
    if inst.X.k > 1 or inst.Y.k > 1:
        raise PreconditionError(f"{what} needs dim X, dim Y <= 1 (use the oracle)")


def _check_not_defective(inst: JoinInstance, rng, ej_dim: int | None) -> None:
    if inst.expected_dim > inst.n:
        raise JoinDefective(f"dim EJ <= {inst.n} < dim X + dim Y + 1 = {inst.expected_dim}")
    if ej_dim is None and inst.field.char == 0:
        ej_dim = terracini_dimension(inst, rng)
    if ej_dim is not None and ej_dim < inst.expected_dim:
        raise JoinDefective(f"dim EJ = {ej_dim} < {inst.expected_dim}")


def _general_point_on(inst: JoinInstance, sample: JoinLineSample, rng) -> ProjPoint:
    f = inst.field
    for _ in range(50):
        a = f.random_element(rng, avoid=(0,), integral=True, box=inst.sample_box)
        b = f.random_element(rng, avoid=(0,), integral=True, box=inst.sample_box)
        z = sample.line.point_at(a, b)
        if z in (sample.x, sample.y):
            continue
        if contains_point(inst.X, z, rng) or contains_point(inst.Y, z, rng):
            continue
        return z
    raise GeneralPositionUncertain("could not place z off X and Y")


def _census_once(inst: JoinInstance, rng, m_X: int, m_Y: int) -> FiberCensus:
    s = sample_join_line(inst, rng)
    z = _general_point_on(inst, s, rng)
    A = _projection_forms(inst, z, rng)
    try:
        pc = _solve_pair_system(inst, A, rng, "collinearity")
    except NotZeroDimensional:
        raise JoinDefective("infinitely many join lines through a general point") from None
    if inst.same_forms:
        # pairs (x, x) with x on a join line through z are not seen by the system
        P, S, T, off = pc.P + pc.S, pc.S, pc.T, pc.P
    else:
        P, S, T, off = pc.P, pc.S, pc.T, pc.P
    return FiberCensus.from_counts(P, S, T, m_X, m_Y, z=z, pairs_offdiagonal=off)


def fiber_census(
    inst: JoinInstance,
    rng,
    profile: tuple[int, int] | None = None,
    ej_dim: int | None = None,
    max_attempts: int | None = None,
) -> FiberCensus:
    """Census at ``inst.trials`` independent general points; all must agree."""
    _require_curves(inst, "the exact census")
    _check_not_defective(inst, rng, ej_dim)
    _require_sampling_room(inst, "the exact census")
    m_X, m_Y = profile if profile is not None else joined_profile(inst, rng)
    results: list[FiberCensus] = []
    failures: list[str] = []
    budget = max_attempts or 4 * inst.trials
    for _ in range(budget):
        try:
            results.append(_census_once(inst, rng, m_X, m_Y))
        except (NonIntegralRatio, CensusIdentityViolation, ChartFailure, ShearDisagreement,
                GeneralPositionUncertain) as exc:
            failures.append(f"{type(exc).__name__}: {exc}")
            continue
        if len(results) == inst.trials:
            break
    if len(results) < inst.trials:
        if failures and all(f.startswith("NonIntegralRatio") for f in failures):
            raise NonIntegralRatio("; ".join(failures))
        raise GeneralPositionUncertain(
            f"only {len(results)}/{inst.trials} censuses succeeded: {failures}"
        )
    keys = {r.key() for r in results}
    if len(keys) != 1:
        raise TrialDisagreement(f"census trials disagree: {sorted(keys)}")
    first = results[0]
    return FiberCensus(
        first.P, first.S, first.T, first.m_X, first.m_Y, first.b, first.z, first.pairs_offdiagonal,
        len(results),
    )


def degree_ej(
    inst: JoinInstance,
    rng,
    census: FiberCensus | None = None,
    ej_dim: int | None = None,
) -> int:
    """deg EJ(X,Y) from pairs whose join line meets a random codim-(dim EJ) slice."""
    _require_curves(inst, "degree_ej")
    if ej_dim is None:
        ej_dim = ej_dimension(inst, rng).dim
    if ej_dim < inst.expected_dim:
        raise JoinDefective(f"dim EJ = {ej_dim} < {inst.expected_dim}")
    if ej_dim == inst.n:
        return 1
    _require_sampling_room(inst, "degree_ej")
    if census is None:
        census = fiber_census(inst, rng, ej_dim=ej_dim)
    per_point = census.pairs_offdiagonal
    values = []
    for _ in range(inst.trials):
        slice_ = random_subspace(inst.field, inst.n, ej_dim, rng, inst.sample_box)
        pc = _solve_pair_system(inst, slice_.annihilator(), rng, "slice")
        if pc.P % per_point:
            raise NonIntegralRatio(f"slice pairs {pc.P} not divisible by {per_point}")
        values.append(pc.P // per_point)
    if len(set(values)) != 1:
        raise TrialDisagreement(f"degree trials disagree: {values}")
    return values[0]


# ---------------------------------------------------------------------------
# tangent checks on W(X) and Terracini inclusion


def _vec_sub(f, u, v):
    return [f.sub(a, b) for a, b in zip(u, v)]


def _vec_scale(f, c, u):
    return [f.mul(c, a) for a in u]


def _ej_jacobian_rows(inst: JoinInstance, xp, yp, lam) -> list[list]:
    """Cone tangent rows of (s, t, lam) -> lam x(s) + (1 - lam) y(t)."""
    f = inst.field
    mu = f.sub(f.one, lam)
    x, y = inst.X.evaluate(xp), inst.Y.evaluate(yp)
    z = [f.add(f.mul(lam, a), f.mul(mu, b)) for a, b in zip(x, y)]
    rows = [z, _vec_sub(f, x, y)]
    rows += [_vec_scale(f, lam, r) for r in inst.X.jacobian(xp)]
    rows += [_vec_scale(f, mu, r) for r in inst.Y.jacobian(yp)]
    return rows


def terracini_inclusion_holds(inst: JoinInstance, xp, yp, lam) -> bool:
    """span(T_X,x, T_Y,y) inside the tangent space of the local join map at z."""
    f = inst.field
    J = _ej_jacobian_rows(inst, xp, yp, lam)
    TX = [inst.X.evaluate(xp)] + inst.X.jacobian(xp)
    TY = [inst.Y.evaluate(yp)] + inst.Y.jacobian(yp)
    return rank(J + TX + TY, f) == rank(J, f)


def _sub_from_vectors(inst: JoinInstance, vecs) -> LinearSubspace:
    vecs = [v for v in vecs if any(not inst.field.is_zero(c) for c in v)]
    return LinearSubspace(inst.field, inst.n, vecs)


def _restricted_projection(f, rows, n1, fixed_first: bool, anchor) -> list[list]:
    """Rows v of T with one half proportional to ``anchor``; return the other halves."""
    half = slice(0, n1) if fixed_first else slice(n1, 2 * n1)
    other = slice(n1, 2 * n1) if fixed_first else slice(0, n1)
    # solve sum_i c_i rows[i][half] = mu * anchor
    M = [list(r[half]) for r in rows] + [[f.neg(a) for a in anchor]]
    transpose = [list(col) for col in zip(*M)]
    kernel = nullspace(transpose, f, len(M))
    out = []
    for c in kernel:
        v = [f.zero] * n1
        for ci, r in zip(c, rows):
            if not f.is_zero(ci):
                v = [f.add(a, f.mul(ci, b)) for a, b in zip(v, r[other])]
        out.append(v)
    return out


def w_tangent_checks(inst: JoinInstance, rng, points: int = 25, side: str = "X") -> dict:
    """Tangent spaces of W(X) = closure{(x, z) : z on a join line through x}.

    W(X) is parametrized by (s, t, lam) -> (x(s), lam x(s) + (1 - lam) y(t)).
    Asserted at every sampled point: Jacobian rank = dim X + dim Y + 1 (generic
    unramifiedness), (i) first projection = T_X,x, (ii) the {x} x P^n slice is
    span(T_Y,y, x), (iv) the P^n x {z} slice is span(T_X,x cap T_Y,y, x).  Item
    (iii) is reported under both readings (pr_1 and pr_2) without asserting.
    """
    if side == "Y":
        return w_tangent_checks(inst.swapped(), rng, points, "X") | {"side": "Y"}
    if inst.field.char != 0:
        raise PreconditionError("W tangent checks are stated in characteristic 0")
    f = inst.field
    X, Y = inst.X, inst.Y
    n1 = inst.n + 1
    zero = [f.zero] * n1
    expected_rank = X.k + Y.k + 1 + 2  # cone over a product: two scaling directions
    tally = {"rank": 0, "i": 0, "ii": 0, "iv": 0, "iii_pr1": 0, "iii_pr2": 0}
    done = 0
    for _ in range(points * 10):
        if done == points:
            break
        xp, yp = _smooth_pair(inst, rng)
        lam = f.random_element(rng, avoid=(0, 1), integral=True, box=inst.sample_box)
        x, y = X.evaluate(xp), Y.evaluate(yp)
        TX = tangent_space(X, xp).space
        TY = tangent_space(Y, yp).space
        if TY.contains(ProjPoint(f, x)):
            continue  # outside G(X): need x not in T_Y,y
        mu = f.sub(f.one, lam)
        z = [f.add(f.mul(lam, a), f.mul(mu, b)) for a, b in zip(x, y)]
        rows = [x + zero, zero + z]
        rows += [r + _vec_scale(f, lam, r) for r in X.jacobian(xp)]
        rows += [zero + _vec_scale(f, mu, r) for r in Y.jacobian(yp)]
        rows += [zero + _vec_sub(f, x, y)]
        done += 1
        if rank(rows, f) == expected_rank:
            tally["rank"] += 1
        pr1 = _sub_from_vectors(inst, [r[:n1] for r in rows])
        pr2 = _sub_from_vectors(inst, [r[n1:] for r in rows])
        joint = span_of([TX, TY])
        tally["i"] += pr1 == TX
        slice_x = _sub_from_vectors(inst, _restricted_projection(f, rows, n1, True, x))
        tally["ii"] += slice_x == span_of([TY, ProjPoint(f, x)])
        slice_z = _sub_from_vectors(inst, _restricted_projection(f, rows, n1, False, z))
        meet = intersect(TX, TY)
        expect_iv = span_of([meet, ProjPoint(f, x)]) if not meet.is_empty() else LinearSubspace(f, inst.n, [x])
        tally["iv"] += slice_z == expect_iv
        tally["iii_pr1"] += pr1 == joint
        tally["iii_pr2"] += pr2 == joint
    if done < points:
        raise GeneralPositionUncertain(f"only {done} points of G(X) sampled")
    report = {"side": side, "points": done, "counts": tally}
    failed = [k for k in ("rank", "i", "ii", "iv") if tally[k] != done]
    report["asserted_pass"] = not failed
    if failed:
        raise CheckFailure(f"W({side}) tangent checks failed: {failed} ({tally})")
    return report


# ---------------------------------------------------------------------------
# plane criterion for unique join lines


def _union_nondegenerate(inst: JoinInstance) -> bool:
    f = inst.field
    cols = []
    for V in (inst.X, inst.Y):
        monos = sorted({e for g in V.forms for e in g.terms})
        for e in monos:
            cols.append([g.terms.get(e, f.zero) for g in V.forms])
    return rank(cols, f) == inst.n + 1


def plane_test_unique_line(inst: JoinInstance, rng) -> bool:
    """For general a, b on X and c on Y: does span(a, b, c) meet Y only in c?

    Equivalent (X a curve, dim Y <= n - 3, X u Y nondegenerate, X not inside Y)
    to a unique join line through a general point of EJ.
    """
    X, Y = inst.X, inst.Y
    if X.k != 1:
        raise PreconditionError("X must be a curve")
    _require_sampling_room(inst, "the plane test")
    if Y.k > 2 or Y.k > inst.n - 3:
        raise PreconditionError(f"need dim Y <= min(2, n - 3), got dim Y = {Y.k}, n = {inst.n}")
    if not _union_nondegenerate(inst):
        raise PreconditionError("X u Y is degenerate (inside a hyperplane)")
    if inst.same_forms or contains_point(Y, X.point(sample_param(X, rng, inst.sample_box)), rng):
        raise PreconditionError("X lies inside Y")
    results = []
    for _ in range(inst.trials):
        for _ in range(50):
            a = X.point(sample_param(X, rng, inst.sample_box))
            b = X.point(sample_param(X, rng, inst.sample_box))
            c = Y.point(sample_param(Y, rng, inst.sample_box))
            plane = span_of([a, b, c])
            if plane.dim == 2:
                break
        else:
            raise GeneralPositionUncertain("could not span a plane")
        results.append(plane_section_count(Y, plane, rng) == 1)
    if len(set(results)) != 1:
        raise TrialDisagreement(f"plane test disagrees across trials: {results}")
    return results[0]
