"""scikit-learn style facade over :func:`joindeg.analysis.analyze`.

``JoinAnalyzer(seed=..., trials=...).fit(instance)`` runs the analysis and
exposes the headline invariants as fitted attributes; ``transform`` maps a
batch of instances to rows of invariants.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from sklearn.base import BaseEstimator

from .analysis import SECTIONS, analyze
from .instances import instance_to_json
from .validation import check_instance

FEATURES = ("dim_EJ", "m_X", "m_Y", "b", "deg_pi", "deg_EJ", "t", "strange", "constrained")


class JoinAnalyzer(BaseEstimator):
    """Compute join invariants of one instance (fit) or many (transform).

    Parameters mirror the instance-file knobs; ``None`` keeps the instance's
    own value.  After ``fit``: ``report_`` (the JSON report), ``summary_``,
    ``m_profile_``, ``deg_pi_``, ``b_``, ``dim_ej_``, ``deg_ej_``, ``t_``,
    ``strange_``, ``constrained_`` (None where a section did not produce a value).
    """

    def __init__(
        self,
        seed: int | None = None,
        trials: int | None = None,
        sample_box: int | None = None,
        arithmetic: str | None = None,
        oracle: bool = False,
        sections: Sequence[str] | None = None,
    ):
        self.seed = seed
        self.trials = trials
        self.sample_box = sample_box
        self.arithmetic = arithmetic
        self.oracle = oracle
        self.sections = sections

    def _spec(self, X, Y=None, field=None):
        return check_instance(
            X, Y, field,
            seed=self.seed, trials=self.trials, sample_box=self.sample_box, arithmetic=self.arithmetic,
        )

    def _run(self, spec) -> dict:
        if self.sections is not None and set(self.sections) - set(SECTIONS):
            raise ValueError(f"unknown sections {sorted(set(self.sections) - set(SECTIONS))}")
        report = analyze(
            spec.instance,
            oracle_primes=spec.oracle_primes if self.oracle else None,
            oracle_budget=spec.oracle_budget,
            sections=self.sections,
            instance_json=instance_to_json(spec),
        )
        return report.to_json()

    def fit(self, X, Y=None, field=None):
        """X: instance (JoinInstance, InstanceSpec, JSON dict or path), or the first variety with Y the second."""
        spec = self._spec(X, Y, field)
        self.report_ = self._run(spec)
        s = self.summary_ = self.report_["summary"]
        self.m_profile_ = (s["m_X"], s["m_Y"]) if "m_X" in s else None
        self.deg_pi_ = s.get("deg_pi")
        self.b_ = s.get("b")
        self.dim_ej_ = s.get("dim_EJ")
        self.deg_ej_ = s.get("deg_EJ")
        self.t_ = s.get("t")
        self.strange_ = s.get("strange")
        self.constrained_ = s.get("constrained")
        self.n_sections_failed_ = sum(1 for v in self.report_["sections"].values() if v["status"] == "error")
        return self

    def transform(self, instances: Iterable) -> list[list]:
        """One row per instance, columns ``FEATURES`` (None where unavailable)."""
        rows = []
        for inst in instances:
            summary = self._run(self._spec(inst))["summary"]
            rows.append([summary.get(k) for k in FEATURES])
        return rows

    def fit_transform(self, instances, y=None) -> list[list]:
        instances = list(instances)
        if not instances:
            raise ValueError("no instances given")
        self.fit(instances[0])
        return self.transform(instances)

    def get_feature_names_out(self, input_features=None):
        return list(FEATURES)
