from __future__ import annotations

import pytest
from sklearn.base import clone

from joindeg.errors import InvalidInstance
from joindeg.estimator import FEATURES, JoinAnalyzer
from joindeg.fields import Rationals
from joindeg.instances import bundled_path, load_bundled
from joindeg.validation import check_field, check_instance, check_variety

FAST = ["validate", "dimensions", "profile", "census"]


def test_params_roundtrip():
    est = JoinAnalyzer(seed=4, trials=2, sections=FAST)
    assert est.get_params()["seed"] == 4
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(trials=5)
    assert c.trials == 5 and est.trials == 2


def test_fit_bundled_instance():
    est = JoinAnalyzer().fit(load_bundled("twisted-cubic-secant"))
    assert est.m_profile_ == (2, 2)
    assert (est.deg_pi_, est.b_, est.dim_ej_, est.deg_ej_, est.t_) == (4, 1, 3, 1, -1)
    assert est.strange_ is False and est.constrained_ is False
    assert est.n_sections_failed_ == 0


def test_fit_two_varieties():
    X = ["s0", "s1", "0", "0"]
    Y = ["0", "0", "s0", "s1"]
    est = JoinAnalyzer(seed=2, sections=FAST).fit(X, Y)
    assert est.report_["replay"]["seed"] == 2
    assert est.deg_pi_ == 1 and est.m_profile_ == (1, 1)


def test_fit_from_path_and_dict():
    path = bundled_path("skew-lines")
    a = JoinAnalyzer(sections=FAST).fit(path)
    b = JoinAnalyzer(sections=FAST).fit(load_bundled("skew-lines").raw)
    assert a.summary_ == b.summary_


def test_transform_rows():
    est = JoinAnalyzer(sections=FAST)
    rows = est.fit_transform([load_bundled("skew-lines"), load_bundled("line-conic")])
    assert est.get_feature_names_out() == list(FEATURES)
    cols = dict(zip(FEATURES, rows[1]))
    assert (cols["m_X"], cols["m_Y"], cols["b"], cols["deg_pi"]) == (1, 1, 2, 2)
    assert cols["deg_EJ"] is None  # degree section not requested


def test_unknown_section():
    with pytest.raises(ValueError):
        JoinAnalyzer(sections=["census", "astrology"]).fit(load_bundled("skew-lines"))


def test_fit_transform_empty():
    with pytest.raises(ValueError):
        JoinAnalyzer().fit_transform([])


def test_validation_helpers():
    assert check_field("Q") == Rationals()
    assert check_field(7).char == 7
    assert check_field({"p": 5}).char == 5
    with pytest.raises(InvalidInstance):
        check_field(True)
    with pytest.raises(InvalidInstance):
        check_field({"q": 3})
    V = check_variety({"source_dim": 1, "components": ["s0^2", "s1^2", "s0*s1"]})
    assert V.n == 2
    with pytest.raises(InvalidInstance):
        check_variety({"components": ["s0"]})
    with pytest.raises(InvalidInstance):
        check_variety(3.5)
    with pytest.raises(InvalidInstance):
        check_instance(42)
    spec = check_instance(load_bundled("skew-lines"), seed=9)
    assert spec.instance.seed == 9
