"""Relative belief ratios and Bayes factors for finite and conjugate normal models."""

__version__ = "0.1.0"

from .errors import (
    DegenerateData,
    DegenerateNormalizer,
    DegeneratePriorMass,
    EvidenceError,
    GammaTooLarge,
    GridTooCoarse,
    InvalidEpsilon,
    NumericalError,
    ValidationError,
    ZeroPredictive,
    ZeroPriorMass,
)
from .evidence import (
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
    rb_estimate,
    rb_event,
    rb_marginal,
    strength,
)
from .model import DiscreteModel, Distribution, Marginalization, load_model, parse_model

__all__ = [name for name in dir() if not name.startswith("_")]
