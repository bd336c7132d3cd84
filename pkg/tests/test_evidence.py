import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_marginalization, random_model
from oracles import rb_by_enumeration
from relbelief.errors import DegeneratePriorMass, GammaTooLarge, ValidationError
from relbelief.evidence import (
    EvidenceClass,
    EvidenceValue,
    bf_event,
    classify,
    credible_region,
    evidence_report,
    jeffreys_label,
    kl_posterior_prior,
    mutual_information,
    plausible_region,
    prosecutor,
    prosecutor_model,
    rb_estimate,
    rb_event,
    rb_events,
    rb_marginal,
    strength,
)
from relbelief.model import DiscreteModel, Marginalization, conditional_prior_predictive, joint_column


def test_rb_and_bf_m1(m1):
    assert rb_event(m1, ["θ1"], "x1") == pytest.approx(1.6, abs=1e-15)
    assert bf_event(m1, ["θ1"], "x1") == pytest.approx(4.0, abs=1e-14)
    assert rb_event(m1, ["θ1"], "x1").kind == "RB"
    assert bf_event(m1, ["θ1"], "x1").kind == "BF"


def test_bf_needs_nontrivial_event(m1):
    with pytest.raises(DegeneratePriorMass):
        bf_event(m1, ["θ1", "θ2"], "x1")


def test_bf_infinite_when_complement_ruled_out():
    model = DiscreteModel(["a", "b"], [0.5, 0.5], ["x", "y"], [[0.5, 0.5], [0.0, 1.0]])
    assert math.isinf(bf_event(model, ["a"], "x"))


def test_rb_marginal_m2(m2):
    model, marg = m2
    rb = rb_marginal(model, marg, "x")
    assert rb["psi0"] == pytest.approx(0.4 / 0.65, rel=1e-14)
    assert rb["psi1"] == pytest.approx(0.9 / 0.65, rel=1e-14)


def test_rb_marginal_identity_m1(m1):
    rb = rb_marginal(m1, None, "x1")
    assert [float(v) for v in rb.values()] == pytest.approx([1.6, 0.4], abs=1e-15)


def test_estimate_and_regions(m1, m2):
    assert rb_estimate(m1, None, "x1") == "θ1"
    model, marg = m2
    assert rb_estimate(model, marg, "x") == "psi1"
    members, content = plausible_region(m1, None, "x1")
    assert members == ("θ1",) and content == pytest.approx(0.8, abs=1e-15)
    members, content = plausible_region(model, marg, "x")
    assert members == ("psi1",) and content == pytest.approx(0.9 * 0.5 / 0.65, abs=1e-12)


def test_estimate_ties_follow_label_order():
    model = DiscreteModel(["b", "a"], [0.5, 0.5], ["x"], [[1.0], [1.0]])
    assert rb_estimate(model, None, "x") == "b"


def test_credible_region(m1):
    region = credible_region(m1, None, "x1", 0.8)
    assert region.members == ("θ1",)
    assert region.posterior_content == pytest.approx(0.8, abs=1e-15)
    assert credible_region(m1, None, "x1", 0.0).members == ()
    with pytest.raises(GammaTooLarge):
        credible_region(m1, None, "x1", 0.9)


def test_strength_kl_mi(m1):
    assert strength(m1, None, "x1", "θ2") == pytest.approx(0.2, abs=1e-15)
    assert kl_posterior_prior(m1, None, "x1") == pytest.approx(0.192745, abs=1e-6)
    assert mutual_information(m1) == pytest.approx(0.8 * math.log(1.6) + 0.2 * math.log(0.4), abs=1e-15)


def test_classify_with_band():
    assert classify(1.6) is EvidenceClass.IN_FAVOR
    assert classify(0.4) is EvidenceClass.AGAINST
    assert classify(1.0) is EvidenceClass.NO_EVIDENCE
    assert classify(1.04, eta=0.05) is EvidenceClass.NO_EVIDENCE
    assert EvidenceValue(0.4).classification is EvidenceClass.AGAINST
    with pytest.raises(ValidationError):
        classify(1.0, eta=-0.1)


@pytest.mark.parametrize(
    "bf, label",
    [
        (1.0, "Barely worth mentioning"),
        (10**0.5, "Substantial"),
        (9.99, "Substantial"),
        (10.0, "Strong"),
        (100.0, "Decisive"),
        (math.inf, "Decisive"),
        (0.25, "Substantial (against)"),
        (0.0, "Decisive (against)"),
    ],
)
def test_jeffreys_buckets(bf, label):
    assert jeffreys_label(bf) == label


def test_prosecutor_closed_form_matches_model():
    res = prosecutor(1000, 10)
    model = prosecutor_model(1000, 10)
    assert rb_event(model, ["guilty"], "has_trait") == pytest.approx(res.rb, rel=1e-12)
    assert bf_event(model, ["guilty"], "has_trait") == pytest.approx(res.bf, rel=1e-12)
    assert prosecutor(10, 1).bf == math.inf
    with pytest.raises(ValidationError):
        prosecutor(10, 11)


def test_report_fields(m1):
    report = evidence_report(m1, None, "x1", psi0="θ2", gamma=0.8).to_dict()
    assert report["rb"] == pytest.approx({"θ1": 1.6, "θ2": 0.4})
    assert report["strength"] == pytest.approx(0.2)
    assert report["classification"] == "against"
    assert report["bf"] == pytest.approx(0.25)
    assert report["credible_region"]["members"] == ["θ1"]


def test_rb_matches_enumeration_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        model = random_model(rng, zeros=True)
        mask = rng.random(model.n_theta) < 0.5
        mask[0] = True
        for j, x in enumerate(model.x_labels):
            if joint_column(model, x).sum() > 0:
                expected = rb_by_enumeration(model.prior.tolist(), model.likelihood.tolist(), j, mask)
                assert rb_events(model, mask, x)[0] == pytest.approx(expected, rel=1e-12)


def test_savage_dickey_and_conditional_mean():
    """RB of psi equals m(x|psi)/m(x) and the conditional-prior mean of RB(theta)."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        model = random_model(rng)
        marg = random_marginalization(rng, model)
        x = model.x_labels[0]
        m = joint_column(model, x).sum()
        rb_theta = np.array([float(v) for v in rb_marginal(model, None, x).values()])
        for psi, value in rb_marginal(model, marg, x).items():
            assert value == pytest.approx(conditional_prior_predictive(model, marg, psi, x) / m, rel=1e-12)
            on = marg.preimage(psi)
            cond = model.prior[on] / model.prior[on].sum()
            assert value == pytest.approx(float(cond @ rb_theta[on]), rel=1e-12)


def test_strength_log_bound_counterexample():
    """Str can fall below 1 - KL / log RB(psi0) even when RB(psi0) > 1."""
    model = DiscreteModel(
        ["a", "b", "c"],
        [0.4995, 0.4995, 0.001],
        ["x", "y"],
        [[0.75, 0.25], [0.25, 0.75], [0.745, 0.255]],
    )
    r0 = float(rb_marginal(model, None, "x")["c"])
    s = strength(model, None, "x", "c")
    kl = kl_posterior_prior(model, None, "x")
    assert r0 > 1
    assert s == pytest.approx(0.25111695269318, abs=1e-12)
    assert 1 - kl / math.log(r0) > s + 0.4
    # a version using only the positive part of log RB does hold
    post = np.array([0.4995 * 0.75, 0.4995 * 0.25, 0.001 * 0.745]) / (0.4995 + 0.001 * 0.745)
    rb = np.array([float(v) for v in rb_marginal(model, None, "x").values()])
    pos = float(post @ np.maximum(np.log(rb), 0.0))
    assert 1 - pos / math.log(r0) <= s


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6),
    st.floats(0.0, 1.0),
    st.data(),
)
def test_strength_upper_and_kl_nonnegative(weights, gamma_frac, data):
    k = len(weights)
    prior = np.array(weights) / sum(weights)
    lik_rows = [data.draw(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=2)) for _ in range(k)]
    lik = np.array(lik_rows) / np.sum(lik_rows, axis=1, keepdims=True)
    model = DiscreteModel([f"t{i}" for i in range(k)], prior, ["x", "y"], lik)
    rb = rb_marginal(model, None, "x")
    for psi, v in rb.items():
        assert strength(model, None, "x", psi) <= float(v) + 1e-12
    assert kl_posterior_prior(model, None, "x") >= -1e-15
    _, content = plausible_region(model, None, "x")
    region = credible_region(model, None, "x", gamma_frac * content)
    assert region.posterior_content >= gamma_frac * content - 1e-12
    assert all(float(rb[m]) > 1 for m in region.members)
