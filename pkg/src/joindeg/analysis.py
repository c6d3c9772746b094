"""Full per-instance analysis: independent sections, each with its own seed."""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from . import __version__
from .errors import JoinDefective, JoinDegError, PreconditionError
from .fields import SURROGATE_PRIMES
from .join import (
    MIN_SAMPLING_FIELD,
    JoinInstance,
    derive_seed,
    degree_ej,
    ej_dimension,
    fiber_census,
    joined_profile,
    section_rng,
    strange_pair_test,
    t_invariant,
    terracini_inclusion_holds,
    w_tangent_checks,
    plane_test_unique_line,
    _smooth_pair,
)
from .oracle import (
    DEFAULT_BUDGET,
    EXTENSION_Q_MIN,
    enumerate_points,
    extension_for,
    general_censuses,
    oracle_degree_slice,
    oracle_dimension,
)
from .variety import validate_variety

SECTIONS = (
    "validate",
    "dimensions",
    "t_invariant",
    "constrained",
    "strange",
    "profile",
    "census",
    "degree",
    "terracini_inclusion",
    "w_tangent",
    "plane_test",
    "oracle",
)

# outcomes that are answers rather than failures
_DEFECTIVE = "defective"
_SKIPPED = "skipped"


@dataclass
class JoinReport:
    instance: dict
    seed: int
    trials: int
    sections: dict = dc_field(default_factory=dict)
    timing: dict = dc_field(default_factory=dict)
    seeds: dict = dc_field(default_factory=dict)
    primes: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(s["status"] != "error" for s in self.sections.values())

    def result(self, name: str):
        sec = self.sections.get(name)
        return None if sec is None or sec["status"] != "ok" else sec["result"]

    def summary(self) -> dict:
        out: dict = {}
        dims = self.result("dimensions")
        if dims:
            out.update(
                dim_X=dims["dim_X"],
                dim_Y=dims["dim_Y"],
                expected_dim=dims["expected"],
                dim_EJ=dims["ej"]["dim"],
                terracini_dim=dims["ej"]["terracini"],
                defective=dims["defective"],
            )
        t = self.result("t_invariant")
        if t:
            out["t"] = t["t"]
        c = self.result("constrained")
        if c:
            out["constrained"] = c["constrained"]
        s = self.result("strange")
        if s:
            out["strange"] = s["strange"]
        p = self.result("profile")
        if p:
            out.update(m_X=p["m_X"], m_Y=p["m_Y"])
        cen = self.result("census")
        if cen:
            for k in ("b", "deg_beta", "deg_alpha_X", "deg_alpha_Y", "deg_pi"):
                out[k] = cen[k]
            out.setdefault("m_X", cen["m_X"])
            out.setdefault("m_Y", cen["m_Y"])
        elif self.sections.get("census", {}).get("status") == _DEFECTIVE:
            out["census"] = "JoinDefective"
        d = self.result("degree")
        if d:
            out["deg_EJ"] = d["deg_EJ"]
        pt = self.result("plane_test")
        if pt:
            out["plane_test"] = pt["unique_join_line"]
        return out

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "tool": {"name": "joindeg", "version": __version__},
            "instance": self.instance,
            "replay": {"seed": self.seed, "trials": self.trials},
            "seeds": self.seeds,
            "primes": self.primes,
            "summary": self.summary(),
            "sections": self.sections,
            "timing": self.timing,
        }


def scrub_timing(report: dict) -> dict:
    """Copy of a report JSON with wall-clock fields zeroed (for replay comparisons)."""
    out = dict(report)
    out["timing"] = {k: 0.0 for k in report.get("timing", {})}
    return out


def _error(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def analyze(
    inst: JoinInstance,
    oracle_primes: Sequence[int] | None = None,
    oracle_budget: int = DEFAULT_BUDGET,
    sections: Sequence[str] | None = None,
    inclusion_configs: int = 10,
    w_points: int = 5,
    oracle_points: int = 5,
    instance_json: dict | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> JoinReport:
    """Run every section; a failing section is recorded and does not stop the rest."""
    wanted = list(SECTIONS if sections is None else sections)
    unknown = set(wanted) - set(SECTIONS)
    if unknown:
        raise ValueError(f"unknown sections {sorted(unknown)}")
    report = JoinReport(instance_json or {}, inst.seed, inst.trials)
    report.primes = {
        "field_char": inst.field.char,
        "modular_counting": list(SURROGATE_PRIMES) if inst.field.char == 0 and inst.arithmetic == "modular" else [],
        "oracle": list(oracle_primes or []),
    }
    ctx: dict = {}

    def run(name: str, fn):
        if name not in wanted:
            return
        rng = section_rng(inst.seed, name)
        report.seeds[name] = derive_seed(inst.seed, name)
        t0 = clock()
        try:
            res = fn(rng)
            report.sections[name] = {"status": "ok", "result": res}
        except JoinDefective as exc:
            report.sections[name] = {"status": _DEFECTIVE, "error": _error(exc)}
        except PreconditionError as exc:
            report.sections[name] = {"status": _SKIPPED, "reason": str(exc)}
        except (JoinDegError, ArithmeticError, ValueError) as exc:
            report.sections[name] = {"status": "error", "error": _error(exc)}
        report.timing[name] = round(clock() - t0, 6)

    curves = inst.X.k <= 1 and inst.Y.k <= 1

    def s_validate(rng):
        return {
            "X": validate_variety(inst.X, rng, box=inst.sample_box).to_json(),
            "Y": validate_variety(inst.Y, rng, box=inst.sample_box).to_json(),
        }

    def ensure_ej(rng):
        if "ej" not in ctx:
            ctx["ej"] = ej_dimension(inst, rng, oracle_budget)
        return ctx["ej"]

    def ensure_t(rng):
        if "t" not in ctx:
            ctx["t"] = t_invariant(inst, rng)
        return ctx["t"]

    def s_dimensions(rng):
        ej = ensure_ej(rng)
        return {
            "dim_X": inst.X.k,
            "dim_Y": inst.Y.k,
            "expected": inst.expected_dim,
            "ej": ej.to_json(),
            "defective": ej.dim < inst.expected_dim,
        }

    def s_t(rng):
        return {"t": ensure_t(rng), "bound": min(inst.X.k, inst.Y.k)}

    def s_constrained(rng):
        ej, t = ensure_ej(rng).dim, ensure_t(rng)
        bound = inst.X.k + inst.Y.k - t
        return {"constrained": ej > bound, "dim_EJ": ej, "dim_X_plus_dim_Y_minus_t": bound}

    def s_strange(rng):
        strange, L = strange_pair_test(inst, rng)
        rows = None if L is None else [[inst.field.format(c) for c in r] for r in L.rows]
        return {"strange": strange, "common_subspace": rows, "probabilistic": True}

    def s_profile(rng):
        if not curves:
            raise PreconditionError("exact profiles need curves; see the oracle section")
        m = joined_profile(inst, rng)
        ctx["profile"] = m
        return {"m_X": m[0], "m_Y": m[1]}

    def s_census(rng):
        if not curves:
            raise PreconditionError("exact census needs curves; see the oracle section")
        ej = ctx.get("ej")
        c = fiber_census(inst, rng, profile=ctx.get("profile"), ej_dim=None if ej is None else ej.dim)
        ctx["census"] = c
        return c.to_json()

    def s_degree(rng):
        if "census" not in ctx and curves:
            raise PreconditionError("no census available")
        d = degree_ej(inst, rng, census=ctx.get("census"), ej_dim=ensure_ej(rng).dim)
        return {"deg_EJ": d}

    def s_inclusion(rng):
        if inst.field.char != 0:
            raise PreconditionError("inclusion spot-checks run in characteristic 0")
        f = inst.field
        fails = 0
        for _ in range(inclusion_configs):
            xp, yp = _smooth_pair(inst, rng)
            lam = f.random_element(rng, avoid=(0, 1), integral=True, box=inst.sample_box)
            fails += not terracini_inclusion_holds(inst, xp, yp, lam)
        return {"configs": inclusion_configs, "failures": fails}

    def s_w(rng):
        return {
            "X": w_tangent_checks(inst, rng, w_points, "X"),
            "Y": w_tangent_checks(inst, rng, w_points, "Y"),
        }

    def s_plane(rng):
        return {"unique_join_line": plane_test_unique_line(inst, rng)}

    def s_oracle(rng):
        if not oracle_primes:
            raise PreconditionError("no oracle primes configured")
        return oracle_block(inst, oracle_primes, rng, oracle_points, oracle_budget)

    run("validate", s_validate)
    run("dimensions", s_dimensions)
    run("t_invariant", s_t)
    run("constrained", s_constrained)
    run("strange", s_strange)
    run("profile", s_profile)
    run("census", s_census)
    run("degree", s_degree)
    run("terracini_inclusion", s_inclusion)
    run("w_tangent", s_w)
    run("plane_test", s_plane)
    run("oracle", s_oracle)
    return report


def oracle_block(inst: JoinInstance, primes: Sequence[int], rng, points: int = 5, budget: int = DEFAULT_BUDGET) -> dict:
    """Oracle dimension over all primes; censuses and slice degree at the largest one."""
    primes = sorted(set(primes))
    p = primes[-1]
    inst_p = inst.reduce_mod(p) if inst.field.char == 0 else inst
    block: dict = {"prime": p}
    dim = oracle_dimension(inst, primes, budget)
    block["dimension"] = dim.to_json()
    if dim.dim < inst.expected_dim:
        block["census"] = {"status": _DEFECTIVE}
        return block
    q_min = 0 if p >= MIN_SAMPLING_FIELD else EXTENSION_Q_MIN
    gf = extension_for(p, q_min)
    block["census_field_size"] = gf.q
    Xt = enumerate_points(inst_p.X, gf, budget)
    Yt = Xt if inst.same_forms else enumerate_points(inst_p.Y, gf, budget)
    block["table_sizes"] = [len(Xt), len(Yt)]
    censuses, stats = general_censuses(Xt, Yt, rng, points, budget)
    block["census"] = [c.to_json() for c in censuses]
    block["sampling"] = stats
    block["degree_slice"] = oracle_degree_slice(inst, p, dim.dim, rng=rng, budget=budget, q_min=q_min)
    return block
