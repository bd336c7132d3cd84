"""Mixture priors that put a lump of mass on a hypothesis.

The prior ``p * spike + (1 - p) * base`` is kept both abstractly, as a
:class:`MixturePrior`, and flattened into an ordinary
:class:`~relbelief.model.DiscreteModel` on the same grid so that every
function in :mod:`relbelief.evidence` applies to it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError, ZeroPredictive
from .evidence import EvidenceValue
from .model import (
    TOL,
    DiscreteModel,
    Distribution,
    Marginalization,
    conditional_prior,
    joint_column,
    predictive,
    resolve,
    theta_vector,
)


@dataclass(frozen=True, eq=False)
class MixturePrior:
    """``p * spike + (1 - p) * base`` for the hypothesis ``psi == psi0``."""

    spike: Distribution
    p: float
    psi0: str
    spike_matches_conditional: bool


def make_mixture(
    model: DiscreteModel,
    marg: Marginalization | None,
    psi0: str,
    p: float,
    spike: Mapping[str, float] | Sequence[float] | None = None,
) -> MixturePrior:
    """Build a mixture prior, defaulting the spike to the conditional prior given ``psi0``.

    A spike that differs from the conditional prior is accepted but recorded
    as ``spike_matches_conditional=False``: the two components then imply
    contradictory beliefs on the hypothesis set.
    """
    marg = resolve(model, marg)
    if not 0.0 < p < 1.0:
        raise ValidationError(f"mixture weight p must lie in (0, 1), got {p!r}")
    cond = conditional_prior(model, marg, psi0)
    if spike is None:
        return MixturePrior(cond, float(p), psi0, True)
    w = theta_vector(model, spike)
    on = marg.preimage(psi0)
    if np.any(w[~on] != 0):
        lab = model.theta_labels[int(np.argmax((w != 0) & ~on))]
        raise ValidationError(f"spike puts mass on {lab!r}, outside the hypothesis set")
    spike_dist = Distribution(model.theta_labels, w)
    matches = bool(np.allclose(w, cond.weights, rtol=0.0, atol=TOL))
    return MixturePrior(spike_dist, float(p), psi0, matches)


def mixture_weights(model: DiscreteModel, mix: MixturePrior) -> np.ndarray:
    return mix.p * mix.spike.weights + (1.0 - mix.p) * model.prior


def flatten(model: DiscreteModel, mix: MixturePrior) -> DiscreteModel:
    """The mixture as an ordinary model on the same parameter grid."""
    w = mixture_weights(model, mix)
    return model.with_prior(w / w.sum())


@dataclass(frozen=True)
class SpikePredictive:
    spike: float
    mixture: float


def spike_predictive(model: DiscreteModel, mix: MixturePrior, x: str) -> SpikePredictive:
    """Predictive probability of ``x`` under the spike and under the whole mixture."""
    m_spike = predictive(mix.spike.weights, model, x)
    m = float(joint_column(model, x).sum())
    return SpikePredictive(m_spike, mix.p * m_spike + (1.0 - mix.p) * m)


def bf_mixture(model: DiscreteModel, mix: MixturePrior, x: str) -> EvidenceValue:
    """Bayes factor for the hypothesis under the mixture prior; ``p`` plays no role."""
    m = float(joint_column(model, x).sum())
    if m <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    return EvidenceValue(predictive(mix.spike.weights, model, x) / m, "BF")


def rb_mixture(model: DiscreteModel, mix: MixturePrior, x: str) -> EvidenceValue:
    """Relative belief ratio of the hypothesis under the mixture prior (depends on ``p``)."""
    sp = spike_predictive(model, mix, x)
    if sp.mixture <= 0:
        raise ZeroPredictive(f"observed {x!r} has mixture predictive probability 0")
    return EvidenceValue(sp.spike / sp.mixture, "RB")
