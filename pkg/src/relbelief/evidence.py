"""Relative belief ratios, Bayes factors and the inferences built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import rel_entr

from .errors import (
    DegeneratePriorMass,
    GammaTooLarge,
    ValidationError,
    ZeroPredictive,
    ZeroPriorMass,
)
from .model import (
    TOL,
    DiscreteModel,
    Marginalization,
    joint_column,
    prior_predictive,
    resolve,
)


class EvidenceClass(str, Enum):
    IN_FAVOR = "in_favor"
    AGAINST = "against"
    NO_EVIDENCE = "no_evidence"


class EvidenceValue(float):
    """A float tagged with the measure that produced it (``"RB"`` or ``"BF"``)."""

    def __new__(cls, value, kind: str = "RB"):
        if kind not in ("RB", "BF"):
            raise ValidationError(f"unknown evidence kind {kind!r}")
        obj = super().__new__(cls, value)
        if not obj >= 0:
            raise ValidationError(f"evidence value must be nonnegative, got {value!r}")
        obj.kind = kind
        return obj

    def __repr__(self):
        return f"EvidenceValue({float(self)!r}, kind={self.kind!r})"

    @property
    def classification(self) -> EvidenceClass:
        return classify(self)


def classify(value: float, eta: float = 0.0) -> EvidenceClass:
    """Compare an evidence value with the cut-off 1.

    ``eta`` widens the no-evidence band to ``[1 - eta, 1 + eta]``; the default
    is an exact comparison.
    """
    if eta < 0:
        raise ValidationError("eta must be nonnegative")
    if value > 1.0 + eta:
        return EvidenceClass.IN_FAVOR
    if value < 1.0 - eta:
        return EvidenceClass.AGAINST
    return EvidenceClass.NO_EVIDENCE


# -- events -----------------------------------------------------------------


def _event_masks(model: DiscreteModel, events) -> np.ndarray:
    masks = np.asarray(events)
    if masks.dtype != bool:
        raise ValidationError("event masks must be boolean")
    masks = np.atleast_2d(masks)
    if masks.shape[1] != model.n_theta:
        raise ValidationError(f"event masks must have {model.n_theta} columns")
    return masks


def rb_events(model: DiscreteModel, events, x: str) -> np.ndarray:
    """Relative belief ratios of many events at once.

    ``events`` is a boolean array of shape ``(n_events, n_theta)``.
    """
    masks = _event_masks(model, events)
    joint = joint_column(model, x)
    m = joint.sum()
    if m <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    prior_mass = masks @ model.prior
    if np.any(prior_mass <= 0):
        raise ZeroPriorMass("event has prior probability 0")
    return (masks @ joint) / (prior_mass * m)


def bf_events(model: DiscreteModel, events, x: str) -> np.ndarray:
    """Bayes factors of many events at once; ``inf`` where the complement is ruled out."""
    masks = _event_masks(model, events)
    joint = joint_column(model, x)
    if joint.sum() <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    p_in = masks @ model.prior
    p_out = ~masks @ model.prior
    if np.any(p_in <= 0) or np.any(p_out <= 0):
        raise DegeneratePriorMass("Bayes factor needs 0 < prior probability < 1")
    s_in = masks @ joint
    s_out = ~masks @ joint
    with np.errstate(divide="ignore"):
        return np.where(s_out > 0, (s_in / s_out) * (p_out / p_in), np.inf)


def rb_event(model: DiscreteModel, A: Iterable[str], x: str) -> EvidenceValue:
    return EvidenceValue(rb_events(model, model.event_mask(A), x)[0], "RB")


def bf_event(model: DiscreteModel, A: Iterable[str], x: str) -> EvidenceValue:
    return EvidenceValue(bf_events(model, model.event_mask(A), x)[0], "BF")


# -- marginal parameter ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Marginal:
    labels: tuple[str, ...]
    prior: np.ndarray
    post: np.ndarray
    rb: np.ndarray


def _marginal(model: DiscreteModel, marg: Marginalization | None, x: str) -> _Marginal:
    marg = resolve(model, marg)
    joint = joint_column(model, x)
    m = joint.sum()
    if m <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    k = len(marg)
    prior = np.bincount(marg.codes, weights=model.prior, minlength=k)
    if np.any(prior <= 0):
        lab = marg.psi_labels[int(np.argmin(prior))]
        raise ZeroPriorMass(f"psi value {lab!r} has prior mass 0")
    post = np.bincount(marg.codes, weights=joint, minlength=k) / m
    return _Marginal(marg.psi_labels, prior, post, post / prior)


def rb_marginal(model: DiscreteModel, marg: Marginalization | None, x: str) -> dict[str, EvidenceValue]:
    """Relative belief ratio of every value of the marginal parameter."""
    mg = _marginal(model, marg, x)
    return {lab: EvidenceValue(v, "RB") for lab, v in zip(mg.labels, mg.rb)}


def rb_estimate(model: DiscreteModel, marg: Marginalization | None, x: str) -> str:
    """Value maximizing the relative belief ratio; ties go to the earliest label."""
    mg = _marginal(model, marg, x)
    return mg.labels[int(np.argmax(mg.rb))]


def plausible_region(
    model: DiscreteModel, marg: Marginalization | None, x: str
) -> tuple[tuple[str, ...], float]:
    """Values with evidence in favor, and their posterior content."""
    mg = _marginal(model, marg, x)
    keep = mg.rb > 1.0
    members = tuple(lab for lab, k in zip(mg.labels, keep) if k)
    return members, float(mg.post[keep].sum())


@dataclass(frozen=True)
class CredibleRegion:
    gamma: float
    cutoff: float
    members: tuple[str, ...]
    posterior_content: float


def credible_region(
    model: DiscreteModel, marg: Marginalization | None, x: str, gamma: float
) -> CredibleRegion:
    """Highest-evidence set holding posterior content at least ``gamma``.

    The cutoff is the largest attained relative belief ratio ``c`` with
    ``P(RB >= c | x) >= gamma``.  ``gamma`` may not exceed the posterior
    content of the plausible region, so every member has evidence in favor.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError("gamma must lie in [0, 1]")
    mg = _marginal(model, marg, x)
    pl_content = float(mg.post[mg.rb > 1.0].sum())
    if gamma > pl_content + TOL:
        raise GammaTooLarge(
            f"gamma={gamma} exceeds the plausible region's posterior content {pl_content:.12g}"
        )
    if gamma == 0.0:
        return CredibleRegion(gamma, math.inf, (), 0.0)
    levels = np.unique(mg.rb)[::-1]
    cutoff = levels[-1]
    for c in levels:
        if mg.post[mg.rb >= c].sum() >= gamma - TOL:
            cutoff = c
            break
    keep = mg.rb >= cutoff
    members = tuple(lab for lab, k in zip(mg.labels, keep) if k)
    return CredibleRegion(gamma, float(cutoff), members, float(mg.post[keep].sum()))


def strength(model: DiscreteModel, marg: Marginalization | None, x: str, psi0: str) -> float:
    """Posterior probability that the true value has evidence no larger than ``psi0``'s."""
    mg = _marginal(model, marg, x)
    try:
        rb0 = mg.rb[mg.labels.index(psi0)]
    except ValueError:
        raise ValidationError(f"unknown psi label {psi0!r}") from None
    return float(mg.post[mg.rb <= rb0].sum())


def kl_posterior_prior(model: DiscreteModel, marg: Marginalization | None, x: str) -> float:
    """Kullback-Leibler divergence of the marginal posterior from the marginal prior."""
    mg = _marginal(model, marg, x)
    return float(rel_entr(mg.post, mg.prior).sum())


def mutual_information(model: DiscreteModel, marg: Marginalization | None = None) -> float:
    m = prior_predictive(model)
    total = 0.0
    for x, mx in zip(model.x_labels, m.weights):
        if mx > 0:
            total += mx * kl_posterior_prior(model, marg, x)
    return total


# -- calibration -------------------------------------------------------------

JEFFREYS_SCALE = (
    (10**0.5, "Barely worth mentioning"),
    (10.0, "Substantial"),
    (10**1.5, "Strong"),
    (100.0, "Very Strong"),
    (math.inf, "Decisive"),
)


def jeffreys_label(bf: float) -> str:
    """Jeffreys' verbal category for a Bayes factor.

    Buckets are closed below and open above.  Values below 1 are labelled by
    their reciprocal with an ``(against)`` suffix.
    """
    bf = float(bf)
    if math.isnan(bf) or bf < 0:
        raise ValidationError(f"not a Bayes factor: {bf!r}")
    against = bf < 1.0
    v = (1.0 / bf if bf > 0 else math.inf) if against else bf
    for upper, name in JEFFREYS_SCALE:
        if v < upper:
            break
    else:
        name = JEFFREYS_SCALE[-1][1]
    return f"{name} (against)" if against else name


@dataclass(frozen=True)
class ProsecutorResult:
    rb: float
    bf: float
    posterior_guilt: float


def prosecutor(N: int, m: int) -> ProsecutorResult:
    """Evidence of guilt from a trait shared by ``m`` of ``N`` people.

    Everyone in the population is equally likely a priori to be guilty and
    the guilty party certainly has the trait.  ``bf`` is infinite when
    ``m == 1``.
    """
    if int(N) != N or int(m) != m or not 1 <= m <= N:
        raise ValidationError("need integers with 1 <= m <= N")
    N, m = int(N), int(m)
    rb = Fraction(N, m)
    bf = Fraction(N - 1, m - 1) if m > 1 else math.inf
    return ProsecutorResult(float(rb), float(bf), float(Fraction(1, m)))


def prosecutor_model(N: int, m: int) -> DiscreteModel:
    """The same setting as an explicit two-point model."""
    if not 1 <= m <= N or N < 2:
        raise ValidationError("need 1 <= m <= N and N >= 2")
    share = (m - 1) / (N - 1)
    return DiscreteModel(
        ("guilty", "innocent"),
        (1 / N, (N - 1) / N),
        ("has_trait", "no_trait"),
        ((1.0, 0.0), (share, 1.0 - share)),
    )


def finite_space_model(probs: Sequence[float], conditioning: Iterable[int]) -> DiscreteModel:
    """Encode a finite probability space and an observed event as a model.

    Sample points become parameter points with prior ``probs``; the observed
    event ``C`` (given as point indices) becomes the data value ``"C"``.
    """
    probs = np.asarray(probs, dtype=float)
    in_c = np.zeros(len(probs), dtype=bool)
    in_c[list(conditioning)] = True
    lik = np.column_stack([in_c, ~in_c]).astype(float)
    return DiscreteModel(tuple(f"w{i}" for i in range(len(probs))), probs, ("C", "not_C"), lik)


# -- report ------------------------------------------------------------------


@dataclass
class EvidenceReport:
    rb: dict[str, float]
    estimate: str
    plausible_region: tuple[str, ...]
    plausible_content: float
    kl: float
    strength: float | None = None
    classification: EvidenceClass | None = None
    bf: float | None = None
    jeffreys: str | None = None
    credible: CredibleRegion | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "rb": dict(self.rb),
            "estimate": self.estimate,
            "plausible_region": sorted(self.plausible_region),
            "plausible_content": self.plausible_content,
            "strength": self.strength,
            "kl": self.kl,
            "classification": None if self.classification is None else self.classification.value,
        }
        if self.bf is not None:
            out["bf"] = self.bf
            out["jeffreys"] = self.jeffreys
        if self.credible is not None:
            out["credible_region"] = {
                "gamma": self.credible.gamma,
                "cutoff": self.credible.cutoff,
                "members": sorted(self.credible.members),
                "posterior_content": self.credible.posterior_content,
            }
        out.update(self.extra)
        return out


def evidence_report(
    model: DiscreteModel,
    marg: Marginalization | None,
    x: str,
    psi0: str | None = None,
    gamma: float | None = None,
    eta: float = 0.0,
) -> EvidenceReport:
    marg = resolve(model, marg)
    mg = _marginal(model, marg, x)
    members, content = plausible_region(model, marg, x)
    report = EvidenceReport(
        rb={lab: float(v) for lab, v in zip(mg.labels, mg.rb)},
        estimate=rb_estimate(model, marg, x),
        plausible_region=members,
        plausible_content=content,
        kl=kl_posterior_prior(model, marg, x),
    )
    if psi0 is not None:
        rb0 = mg.rb[marg.psi_index(psi0)]
        report.strength = strength(model, marg, x, psi0)
        report.classification = classify(rb0, eta)
        on = marg.preimage(psi0)
        if 0 < model.prior[on].sum() < 1:
            bf = float(bf_events(model, on, x)[0])
            report.bf = bf
            report.jeffreys = jeffreys_label(bf)
    if gamma is not None:
        report.credible = credible_region(model, marg, x, gamma)
    return report
