"""Parametrized projective varieties: validation, sampling, tangent spaces, sections.

A variety is the image of P^k (k <= 2) under n+1 forms of a common degree.
Implicit equations are never computed; every question is pulled back to the
parameter space and answered with binary-form gcds or the bivariate solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .bivar import BivarSystem, count_solutions
from .errors import (
    BasePointFound,
    DegenerateForms,
    LineInsideVariety,
    NonBirationalParam,
    NotZeroDimensional,
    PositiveDimensionalSection,
    SingularParameter,
    ZeroVector,
)
from .fields import Field, PrimeField, Rationals
from .poly import HomPoly, UniPoly, distinct_root_count, linear_combination, parse_poly, uni_gcd
from .projective import (
    LinearSubspace,
    ProjLine,
    ProjPoint,
    random_invertible,
    rank,
)


@dataclass(frozen=True, eq=False)
class ParamVariety:
    """Image of P^k under ``forms`` (n+1 forms in k+1 variables, same degree)."""

    field: Field
    source_dim: int
    forms: tuple[HomPoly, ...]
    label: str = ""

    def __post_init__(self):
        k = self.source_dim
        if k not in (0, 1, 2):
            raise ValueError(f"source dimension {k} not supported (0, 1 or 2)")
        if len(self.forms) < 2:
            raise ValueError("need at least 2 component forms (ambient n >= 1)")
        degs = {f.degree for f in self.forms if not f.is_zero()}
        if not degs:
            raise DegenerateForms("all component forms are zero")
        if len(degs) > 1:
            raise DegenerateForms(f"component forms have different degrees {sorted(degs)}")
        d = degs.pop()
        if k == 0 and d != 0:
            raise DegenerateForms("a point (source dimension 0) needs constant components")
        fixed = []
        for f in self.forms:
            if f.nvars != k + 1 or f.field != self.field:
                raise DegenerateForms(f"component {f} is not a form in {k + 1} variables over {self.field}")
            fixed.append(HomPoly.zero(self.field, k + 1, d) if f.is_zero() else f)
        object.__setattr__(self, "forms", tuple(fixed))

    @classmethod
    def from_strings(cls, field: Field, source_dim: int, components: Sequence[str], label: str = "") -> "ParamVariety":
        forms = tuple(parse_poly(c, field, source_dim + 1) for c in components)
        return cls(field, source_dim, forms, label)

    @property
    def n(self) -> int:
        return len(self.forms) - 1

    @property
    def k(self) -> int:
        return self.source_dim

    @property
    def degree(self) -> int:
        return self.forms[0].degree

    @property
    def is_linear(self) -> bool:
        return self.degree <= 1

    def same_forms(self, other: "ParamVariety") -> bool:
        return self.field == other.field and self.source_dim == other.source_dim and self.forms == other.forms

    def evaluate(self, param: Sequence) -> list:
        return [f.evaluate(param) for f in self.forms]

    def point(self, param: Sequence) -> ProjPoint:
        return ProjPoint(self.field, self.evaluate(param))

    def jacobian(self, param: Sequence) -> list[list]:
        """Rows d x / d s_i evaluated at ``param``."""
        return [[f.derivative(i).evaluate(param) for f in self.forms] for i in range(self.k + 1)]

    def pullback(self, linear_forms: Sequence[Sequence]) -> list[HomPoly]:
        """Forms l(x(s)) for each coefficient vector l."""
        return [linear_combination(self.forms, l) for l in linear_forms]

    def coefficient_rank(self) -> int:
        monos = sorted({e for f in self.forms for e in f.terms})
        rows = [[f.terms.get(e, self.field.zero) for e in monos] for f in self.forms]
        return rank(rows, self.field) if monos else 0

    def reduce_mod(self, p: int) -> "ParamVariety":
        F = PrimeField(p)
        forms = tuple(
            HomPoly(F, f.nvars, {e: F.coerce(c) for e, c in f.terms.items()}, f.degree) for f in self.forms
        )
        return ParamVariety(F, self.source_dim, forms, self.label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "source_dim": self.source_dim,
            "components": [f.to_str() for f in self.forms],
        }

    def __repr__(self):
        comps = " : ".join(f.to_str() for f in self.forms)
        return f"ParamVariety({self.label or '?'} = [{comps}] over {self.field})"


# ---------------------------------------------------------------------------
# binary and ternary common zeros


@dataclass(frozen=True)
class BinaryZeros:
    count: int
    gcd: UniPoly
    infinity_multiplicity: int

    @property
    def squarefree(self) -> bool:
        return distinct_root_count(self.gcd) == self.gcd.degree and self.infinity_multiplicity <= 1


def binary_common_zeros(forms: Sequence[HomPoly]) -> BinaryZeros | None:
    """Distinct common zeros in P^1 of binary forms; None if all forms vanish."""
    nz = [f for f in forms if not f.is_zero()]
    if not nz:
        return None
    field = nz[0].field
    g = UniPoly(field, [])
    inf = None
    for f in nz:
        u = f.to_uni()
        g = uni_gcd(g, u) if not (g.is_zero() and u.is_zero()) else g
        m = f.degree - u.degree
        inf = m if inf is None else min(inf, m)
    count = distinct_root_count(g) + (1 if inf else 0)
    return BinaryZeros(count, g, inf)


def ternary_common_zeros(forms: Sequence[HomPoly], rng, tries: int = 8, box: int = 1000) -> int:
    """Distinct common zeros in P^2 of ternary forms.

    A random coordinate change moves the line at infinity into general position;
    the affine part goes to the bivariate solver and the line at infinity is
    handled with binary forms.
    """
    nz = [f for f in forms if not f.is_zero()]
    if not nz:
        raise PositiveDimensionalSection("all forms vanish identically")
    field = nz[0].field
    for _ in range(tries):
        M = random_invertible(field, 3, rng, box)
        moved = [f.substitute_linear(M) for f in nz]
        at_inf = binary_common_zeros([f.restrict_to_infinity() for f in moved])
        if at_inf is None:
            continue  # the infinity line lies in the zero set; resample
        affine = [f.to_bi() for f in moved]
        affine = [a for a in affine if not a.is_zero()]
        if any(set(a.terms) == {(0, 0)} for a in affine):
            finite = 0
        else:
            if len(affine) < 2:
                raise PositiveDimensionalSection("a single curve is not a zero-dimensional section")
            try:
                finite = count_solutions(BivarSystem(tuple(affine), "slice"), rng).P
            except NotZeroDimensional:
                raise PositiveDimensionalSection("common zero set has positive dimension") from None
        return finite + at_inf.count
    raise PositiveDimensionalSection("could not find a chart for the section")


def _common_zero_count(V: ParamVariety, forms: Sequence[HomPoly], rng) -> int | None:
    """Common zeros on the source P^k; None when every form vanishes identically."""
    if V.k == 0:
        return None if all(f.is_zero() for f in forms) else 0
    if V.k == 1:
        z = binary_common_zeros(forms)
        return None if z is None else z.count
    if all(f.is_zero() for f in forms):
        return None
    return ternary_common_zeros(forms, rng)


def _minor_forms(V: ParamVariety, pt: Sequence) -> list[HomPoly]:
    """2x2 minors of [x(s); pt] as forms in s."""
    f = V.field
    out = []
    for i in range(V.n + 1):
        for j in range(i + 1, V.n + 1):
            if f.is_zero(pt[i]) and f.is_zero(pt[j]):
                continue
            out.append(V.forms[i].scale(pt[j]) - V.forms[j].scale(pt[i]))
    return out


# ---------------------------------------------------------------------------
# operations


def sample_param(V: ParamVariety, rng, box: int = 1000, avoid_base: bool = True) -> tuple:
    f = V.field
    for _ in range(1000):
        if V.k == 0:
            param = (f.one,)
        else:
            param = tuple(f.random_element(rng, integral=True, box=box) for _ in range(V.k + 1))
            if all(f.is_zero(c) for c in param):
                continue
        if avoid_base and all(f.is_zero(c) for c in V.evaluate(param)):
            continue
        return param
    raise ZeroVector("could not sample a non-base parameter")


def sample_point(V: ParamVariety, rng, box: int = 1000) -> tuple[tuple, ProjPoint]:
    param = sample_param(V, rng, box)
    return param, V.point(param)


@dataclass(frozen=True)
class TangentFrame:
    param: tuple
    point: ProjPoint
    space: LinearSubspace

    @property
    def dim(self) -> int:
        return self.space.dim


def tangent_space(V: ParamVariety, param: Sequence) -> TangentFrame:
    """Embedded tangent space: span of x(s) and the partial derivatives.

    Including x(s) itself matters in characteristic p, where Euler's relation
    degenerates when p divides the degree.
    """
    pt = V.point(param)
    rows = [list(pt.coords)] + V.jacobian(param)
    T = LinearSubspace(V.field, V.n, rows)
    if T.dim < V.k:
        raise SingularParameter(f"tangent rank {T.dim + 1} < {V.k + 1} at {tuple(param)}")
    return TangentFrame(tuple(param), pt, T)


def is_singular_param(V: ParamVariety, param: Sequence) -> bool:
    try:
        tangent_space(V, param)
    except SingularParameter:
        return True
    return False


def line_intersection_profile(V: ParamVariety, L: ProjLine, rng=None) -> tuple[int, bool]:
    """(number of distinct closure points of V on L, transversality flag)."""
    if V.k > 1:
        raise ValueError("line profiles are only computed for points and curves")
    if V.k == 0:
        x = V.point((V.field.one,))
        return (1 if L.contains(x) else 0), True
    ann = L.subspace().annihilator()
    z1 = binary_common_zeros(V.pullback(ann))
    if z1 is None:
        raise LineInsideVariety(f"{L} lies on {V.label or 'the variety'}")
    transversal = z1.squarefree
    if rng is not None and transversal:
        M = random_invertible(V.field, len(ann), rng)
        mixed = [[V.field.dot(row, col) for col in zip(*ann)] for row in M]
        z2 = binary_common_zeros(V.pullback(mixed))
        transversal = z2 is not None and z2.count == z1.count and z2.squarefree
    return z1.count, transversal


def plane_section_count(V: ParamVariety, plane: LinearSubspace, rng=None) -> int:
    """Number of distinct closure points of V lying in a 2-plane."""
    if plane.dim != 2:
        raise ValueError(f"expected a plane, got dimension {plane.dim}")
    if V.k == 0:
        return 1 if plane.contains(V.point((V.field.one,))) else 0
    forms = V.pullback(plane.annihilator())
    if V.k == 1:
        z = binary_common_zeros(forms)
        if z is None:
            raise PositiveDimensionalSection("the plane contains the curve")
        return z.count
    import random as _random

    return ternary_common_zeros(forms, rng or _random.Random(0))


def contains_point(V: ParamVariety, pt: ProjPoint, rng=None) -> bool:
    if V.k == 0:
        return V.point((V.field.one,)) == pt
    count = _common_zero_count(V, _minor_forms(V, pt.coords), rng)
    return count is None or count > 0


@dataclass
class ValidationReport:
    label: str
    basepoint_free: bool
    injectivity_count: int
    linear: bool
    nondegenerate: bool
    coefficient_rank: int
    singular_samples: int
    samples: int
    notes: list = dc_field(default_factory=list)

    @property
    def injective(self) -> bool:
        return self.injectivity_count == 1

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "basepoint_free": self.basepoint_free,
            "injective": self.injective,
            "injectivity_count": self.injectivity_count,
            "linear": self.linear,
            "nondegenerate": self.nondegenerate,
            "coefficient_rank": self.coefficient_rank,
            "singular_samples": self.singular_samples,
            "samples": self.samples,
            "notes": list(self.notes),
        }


def validate_variety(V: ParamVariety, rng, samples: int = 5, box: int = 1000) -> ValidationReport:
    """Check base-point freeness, generic injectivity, linearity and smoothness samples."""
    crank = V.coefficient_rank()
    if V.k >= 1 and crank <= 1:
        raise DegenerateForms("the parametrization is constant")
    notes = []
    if V.k == 0:
        injectivity = 1
    else:
        base = _common_zero_count(V, V.forms, rng)
        if base:
            raise BasePointFound(f"{base} base point(s) for {V.label or 'the variety'}")
        param = sample_param(V, rng, box)
        injectivity = _common_zero_count(V, _minor_forms(V, V.evaluate(param)), rng)
        if injectivity is None or injectivity != 1:
            raise NonBirationalParam(
                f"a general image point has {injectivity if injectivity is not None else 'infinitely many'} preimages"
            )
    singular = 0
    for _ in range(samples):
        if is_singular_param(V, sample_param(V, rng, box)):
            singular += 1
    if singular:
        notes.append(f"{singular}/{samples} sampled parameters are singular")
    return ValidationReport(
        label=V.label,
        basepoint_free=True,
        injectivity_count=injectivity,
        linear=V.is_linear,
        nondegenerate=crank == V.n + 1,
        coefficient_rank=crank,
        singular_samples=singular,
        samples=samples,
        notes=notes,
    )
