"""Sensitivity of relative belief ratios and Bayes factors to the prior.

Two one-parameter families of perturbed priors are supported:

* linear contamination, ``pi_eps ∝ (1 - eps) * pi + eps * q`` with ``q``
  an unnormalized nonnegative function on the grid;
* geometric contamination, ``pi_eps ∝ pi**(1 - eps) * q**eps`` with ``q``
  a probability distribution whose support is that of ``pi``.

Closed-form logarithmic derivatives at ``eps = 0`` are provided together
with a finite-difference oracle that differentiates the perturbed quantity
computed on the flattened model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateNormalizer,
    DegeneratePriorMass,
    InvalidEpsilon,
    ValidationError,
    ZeroPredictive,
)
from .evidence import bf_events, rb_events
from .model import TOL, DiscreteModel, Distribution, joint_column, theta_vector

Target = Literal["rb", "bf"]


@dataclass(frozen=True, eq=False)
class LinearContamination:
    """Direction ``q >= 0`` for linear contamination; ``q`` need not sum to one."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 1 or np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValidationError("q must be a finite nonnegative vector")
        if q.sum() <= 0:
            raise ValidationError("q must have positive total mass")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @classmethod
    def on(cls, model: DiscreteModel, q: Mapping[str, float] | Sequence[float]):
        return cls(theta_vector(model, q))

    @property
    def c_q(self) -> float:
        return float(self.q.sum())

    @property
    def q_star(self) -> np.ndarray:
        return self.q / self.q.sum()


@dataclass(frozen=True, eq=False)
class GeometricContamination:
    """Direction distribution ``q`` for geometric contamination."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 1 or np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValidationError("q must be a finite nonnegative vector")
        if abs(q.sum() - 1.0) > TOL:
            raise ValidationError(f"q must sum to 1, sums to {q.sum()!r}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @classmethod
    def on(cls, model: DiscreteModel, q: Mapping[str, float] | Sequence[float]):
        return cls(theta_vector(model, q))

    def ratio(self, model: DiscreteModel) -> np.ndarray:
        """``r = q / pi`` on the prior's support, 0 elsewhere."""
        _check_length(model, self)
        pi = model.prior
        if np.any((pi == 0) & (self.q > 0)):
            raise ValidationError("geometric direction puts mass outside the prior's support")
        return np.divide(self.q, pi, out=np.zeros_like(pi), where=pi > 0)

    def log_ratio(self, model: DiscreteModel) -> np.ndarray:
        """``log r`` on the prior's support (0 elsewhere, where it carries no weight)."""
        r = self.ratio(model)
        on = model.prior > 0
        if np.any(r[on] == 0):
            raise ValidationError("log-derivatives need q > 0 wherever the prior is positive")
        return np.log(r, out=np.zeros_like(r), where=on)


Contamination = LinearContamination | GeometricContamination


def _check_length(model: DiscreteModel, spec: Contamination) -> None:
    if spec.q.shape[0] != model.n_theta:
        raise ValidationError(f"q has {spec.q.shape[0]} entries, model has {model.n_theta} theta points")


def _raw_weights(model: DiscreteModel, spec: Contamination, eps: float) -> np.ndarray:
    # Valid for small negative eps too; entries may then be negative.
    _check_length(model, spec)
    pi = model.prior
    if isinstance(spec, LinearContamination):
        return ((1.0 - eps) * pi + eps * spec.q) / (1.0 - eps + eps * spec.c_q)
    r = spec.ratio(model)
    on = pi > 0
    with np.errstate(divide="ignore"):
        w = np.where(on, pi * np.power(r, eps, where=on, out=np.ones_like(r)), 0.0)
    total = w.sum()
    if not np.isfinite(total) or total <= 0:
        raise DegenerateNormalizer(f"geometric normalizer is {total!r} at eps={eps!r}")
    return w / total


def contaminated_prior(model: DiscreteModel, spec: Contamination, eps: float) -> Distribution:
    if not 0.0 <= eps <= 1.0:
        raise InvalidEpsilon(f"eps must lie in [0, 1], got {eps!r}")
    if eps == 0.0:
        return Distribution(model.theta_labels, model.prior)
    w = _raw_weights(model, spec, eps)
    return Distribution(model.theta_labels, w / w.sum())


def contaminated_model(model: DiscreteModel, spec: Contamination, eps: float) -> DiscreteModel:
    return model.with_prior(contaminated_prior(model, spec, eps).weights)


# -- closed forms ------------------------------------------------------------


def _predictive(model: DiscreteModel, x: str) -> float:
    m = float(joint_column(model, x).sum())
    if m <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    return m


def _point_terms(model: DiscreteModel, theta0: str, x: str) -> tuple[int, float, float]:
    i = model.theta_index(theta0)
    pi0 = float(model.prior[i])
    if not 0.0 < pi0 < 1.0:
        raise DegeneratePriorMass(f"{theta0!r} has prior probability {pi0!r}")
    mask = np.zeros(model.n_theta, dtype=bool)
    mask[i] = True
    bf = float(bf_events(model, mask, x)[0])
    if not math.isfinite(bf):
        raise ZeroPredictive(f"complement of {theta0!r} has posterior probability 0")
    return i, pi0 / (1.0 - pi0), bf


def rb_logderiv_linear(model: DiscreteModel, spec: LinearContamination, x: str) -> float:
    """d/d eps of log RB_eps(theta | x) at 0; the same for every theta."""
    _check_length(model, spec)
    m = _predictive(model, x)
    m_q = float(np.dot(spec.q_star, model.likelihood[:, model.x_index(x)]))
    return spec.c_q * (1.0 - m_q / m)


def bf_logderiv_linear(model: DiscreteModel, spec: LinearContamination, theta0: str, x: str) -> float:
    """d/d eps of log BF_eps({theta0} | x) at 0."""
    d = rb_logderiv_linear(model, spec, x)
    i, odds, bf = _point_terms(model, theta0, x)
    pi0 = model.prior[i]
    shift = spec.c_q * (pi0 - spec.q_star[i]) / (1.0 - pi0)
    return float(d * (1.0 + odds * bf) + shift * (1.0 - bf))


def rb_logderiv_geometric(model: DiscreteModel, spec: GeometricContamination, x: str) -> float:
    """``E_prior(log r) - E_posterior(log r)``; the same for every theta."""
    log_r = spec.log_ratio(model)
    joint = joint_column(model, x)
    m = _predictive(model, x)
    return float(np.dot(model.prior, log_r) - np.dot(joint, log_r) / m)


def bf_logderiv_geometric(
    model: DiscreteModel,
    spec: GeometricContamination,
    theta0: str,
    x: str,
    flip_lead: bool = False,
) -> float:
    """d/d eps of log BF_eps({theta0} | x) at 0.

    With ``flip_lead=True`` the leading term enters with the opposite sign.
    Finite differences contradict that variant; it is kept only so the two
    can be compared.
    """
    d = rb_logderiv_geometric(model, spec, x)
    log_r = spec.log_ratio(model)
    i, odds, bf = _point_terms(model, theta0, x)
    lead = -d if flip_lead else d
    return float(lead * (1.0 + odds * bf) + (np.dot(model.prior, log_r) - log_r[i]) * odds * (1.0 - bf))


def rb_logderiv(model: DiscreteModel, spec: Contamination, x: str) -> float:
    if isinstance(spec, LinearContamination):
        return rb_logderiv_linear(model, spec, x)
    return rb_logderiv_geometric(model, spec, x)


def bf_logderiv(
    model: DiscreteModel, spec: Contamination, theta0: str, x: str, flip_lead: bool = False
) -> float:
    if isinstance(spec, LinearContamination):
        return bf_logderiv_linear(model, spec, theta0, x)
    return bf_logderiv_geometric(model, spec, theta0, x, flip_lead=flip_lead)


def expected_logderiv(
    model: DiscreteModel,
    spec: Contamination,
    target: Target = "rb",
    theta0: str | None = None,
    flip_lead: bool = False,
) -> float:
    """Prior-predictive expectation of a log-derivative over the sample space."""
    m = model.prior @ model.likelihood
    total = 0.0
    for x, mx in zip(model.x_labels, m):
        if mx <= 0:
            continue
        if target == "rb":
            total += mx * rb_logderiv(model, spec, x)
        elif target == "bf":
            if theta0 is None:
                raise ValidationError("theta0 is required for the Bayes factor target")
            total += mx * bf_logderiv(model, spec, theta0, x, flip_lead=flip_lead)
        else:
            raise ValidationError(f"unknown target {target!r}")
    return total


# -- numerical companion -----------------------------------------------------


def _perturbed(model: DiscreteModel, spec: Contamination, eps: float, target: Target, theta0: str, x: str):
    w = _raw_weights(model, spec, eps) if eps != 0.0 else model.prior
    if np.any(w < 0):
        return None
    flat = model.with_prior(w / w.sum())
    mask = np.zeros(model.n_theta, dtype=bool)
    mask[model.theta_index(theta0)] = True
    if target == "rb":
        return float(rb_events(flat, mask, x)[0])
    if target == "bf":
        return float(bf_events(flat, mask, x)[0])
    raise ValidationError(f"unknown target {target!r}")


def perturbed_value(
    model: DiscreteModel, spec: Contamination, eps: float, target: Target, theta0: str, x: str
) -> float:
    """RB_eps or BF_eps of ``{theta0}`` computed on the flattened contaminated model."""
    if not 0.0 <= eps <= 1.0:
        raise InvalidEpsilon(f"eps must lie in [0, 1], got {eps!r}")
    return _perturbed(model, spec, eps, target, theta0, x)


@dataclass(frozen=True)
class FiniteDifference:
    estimate: float
    scheme: str


def fd_logderiv(
    model: DiscreteModel,
    spec: Contamination,
    target: Target,
    theta0: str,
    x: str,
    steps: tuple[float, float] = (1e-3, 1e-4),
) -> FiniteDifference:
    """Derivative of ``log value(eps)`` at 0 by differences plus one Richardson step.

    Central differences are used when the prior stays nonnegative at
    ``-steps[0]``; otherwise second-order one-sided differences.
    """
    h1, h2 = steps
    t2 = (h1 / h2) ** 2

    def g(eps):
        v = _perturbed(model, spec, eps, target, theta0, x)
        return None if v is None else math.log(v)

    g0 = g(0.0)
    if g(-h1) is not None and g(-h2) is not None:
        scheme = "central"

        def diff(h):
            return (g(h) - g(-h)) / (2.0 * h)
    else:
        scheme = "forward"

        def diff(h):
            return (-3.0 * g0 + 4.0 * g(h) - g(2.0 * h)) / (2.0 * h)

    return FiniteDifference((t2 * diff(h2) - diff(h1)) / (t2 - 1.0), scheme)


@dataclass(frozen=True)
class ScanRow:
    eps: float
    value: float
    log_value: float


def eps_scan(
    model: DiscreteModel,
    spec: Contamination,
    target: Target,
    theta0: str,
    x: str,
    eps_grid: Sequence[float],
) -> list[ScanRow]:
    rows = []
    for eps in eps_grid:
        v = perturbed_value(model, spec, float(eps), target, theta0, x)
        rows.append(ScanRow(float(eps), v, math.log(v) if v > 0 else -math.inf))
    return rows


@dataclass(frozen=True)
class DerivativeCheck:
    closed_form: float
    finite_difference: float
    scheme: str
    flipped_form: float | None = None

    @property
    def gap(self) -> float:
        return abs(self.closed_form - self.finite_difference)

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.closed_form), abs(self.finite_difference))
        return self.gap / scale if scale > 0 else 0.0


def check_derivative(
    model: DiscreteModel, spec: Contamination, target: Target, theta0: str, x: str
) -> DerivativeCheck:
    """Closed-form log-derivative next to its finite-difference estimate."""
    fd = fd_logderiv(model, spec, target, theta0, x)
    if target == "rb":
        return DerivativeCheck(rb_logderiv(model, spec, x), fd.estimate, fd.scheme)
    flipped = None
    if isinstance(spec, GeometricContamination):
        flipped = bf_logderiv_geometric(model, spec, theta0, x, flip_lead=True)
    return DerivativeCheck(bf_logderiv(model, spec, theta0, x), fd.estimate, fd.scheme, flipped)
