"""Finite Bayesian models and the basic probability computations on them.

A :class:`DiscreteModel` is a finite parameter grid with prior weights, a
finite sample space and a likelihood matrix whose rows are probability mass
functions.  A :class:`Marginalization` maps every parameter point to a label
of the parameter of interest.  Everything else in the package is built from
the handful of functions defined here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError, ZeroPredictive, ZeroPriorMass

TOL = 1e-12


def _frozen(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValidationError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0].tolist()
        raise ValidationError(f"{what} has a non-finite entry at index {bad}")
    if np.any(arr < 0):
        bad = np.argwhere(arr < 0)[0].tolist()
        raise ValidationError(f"{what} has a negative entry at index {bad}")
    arr.setflags(write=False)
    return arr


def _labels(values: Iterable, what: str) -> tuple[str, ...]:
    labels = tuple(str(v) for v in values)
    if len(set(labels)) != len(labels):
        seen: set[str] = set()
        for i, lab in enumerate(labels):
            if lab in seen:
                raise ValidationError(f"{what} label {lab!r} at index {i} is a duplicate")
            seen.add(lab)
    return labels


def normalize(weights) -> np.ndarray:
    """Rescale nonnegative weights so that they sum to one.

    Model construction never renormalizes silently; call this explicitly when
    weights are only known up to a constant.
    """
    arr = np.asarray(weights, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValidationError("weights must be finite and nonnegative")
    total = arr.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValidationError("weights sum to zero and cannot be normalized")
    return arr / total


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability weights over an ordered set of labels."""

    labels: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _labels(self.labels, "distribution"))
        w = _frozen(self.weights, 1, "weights")
        if w.shape[0] != len(self.labels):
            raise ValidationError(
                f"{w.shape[0]} weights for {len(self.labels)} labels"
            )
        if abs(w.sum() - 1.0) > TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __getitem__(self, label: str) -> float:
        return float(self.weights[self.labels.index(label)])

    def __len__(self) -> int:
        return len(self.labels)

    def mass(self, labels: Iterable[str]) -> float:
        index = {lab: i for i, lab in enumerate(self.labels)}
        return float(sum(self.weights[index[lab]] for lab in set(labels)))

    def as_dict(self) -> dict[str, float]:
        return {lab: float(w) for lab, w in zip(self.labels, self.weights)}


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    """A finite sampling model together with a prior.

    Parameters
    ----------
    theta_labels : sequence of str
        Names of the parameter points.
    prior : array_like, shape (k,)
        Prior probabilities, nonnegative, summing to one.  Zero entries are
        allowed and simply contribute nothing.
    x_labels : sequence of str
        Names of the sample points.
    likelihood : array_like, shape (k, n)
        ``likelihood[i, j]`` is the probability of sample point ``j`` under
        parameter point ``i``; every row sums to one.
    """

    theta_labels: tuple[str, ...]
    prior: np.ndarray
    x_labels: tuple[str, ...]
    likelihood: np.ndarray
    _theta_index: dict = field(init=False, repr=False, compare=False)
    _x_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        theta = _labels(self.theta_labels, "theta")
        xs = _labels(self.x_labels, "x")
        prior = _frozen(self.prior, 1, "prior")
        lik = _frozen(self.likelihood, 2, "likelihood")
        if prior.shape[0] != len(theta):
            raise ValidationError(f"prior has {prior.shape[0]} entries for {len(theta)} theta labels")
        if lik.shape != (len(theta), len(xs)):
            raise ValidationError(
                f"likelihood shape {lik.shape} does not match ({len(theta)}, {len(xs)})"
            )
        if abs(prior.sum() - 1.0) > TOL:
            raise ValidationError(f"prior sums to {prior.sum()!r}, not 1")
        row_err = np.abs(lik.sum(axis=1) - 1.0)
        if np.any(row_err > TOL):
            i = int(np.argmax(row_err > TOL))
            raise ValidationError(
                f"likelihood row {i} ({theta[i]!r}) sums to {lik[i].sum()!r}, not 1"
            )
        object.__setattr__(self, "theta_labels", theta)
        object.__setattr__(self, "x_labels", xs)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "likelihood", lik)
        object.__setattr__(self, "_theta_index", {lab: i for i, lab in enumerate(theta)})
        object.__setattr__(self, "_x_index", {lab: i for i, lab in enumerate(xs)})

    @property
    def n_theta(self) -> int:
        return len(self.theta_labels)

    def theta_index(self, label: str) -> int:
        try:
            return self._theta_index[label]
        except KeyError:
            raise ValidationError(f"unknown theta label {label!r}") from None

    def x_index(self, label: str) -> int:
        try:
            return self._x_index[label]
        except KeyError:
            raise ValidationError(f"unknown x label {label!r}") from None

    def event_mask(self, labels: Iterable[str]) -> np.ndarray:
        mask = np.zeros(self.n_theta, dtype=bool)
        for lab in labels:
            mask[self.theta_index(lab)] = True
        return mask

    def with_prior(self, prior) -> "DiscreteModel":
        """Same sampling model, different prior."""
        return DiscreteModel(self.theta_labels, prior, self.x_labels, self.likelihood)

    def to_dict(self) -> dict:
        return {
            "theta": list(self.theta_labels),
            "prior": self.prior.tolist(),
            "x": list(self.x_labels),
            "likelihood": self.likelihood.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Marginalization:
    """Surjective map from parameter points to labels of a marginal parameter.

    ``psi_labels`` fixes the canonical order used for tie-breaking; by default
    it is the order of first appearance in ``psi_of``.
    """

    psi_of: tuple[str, ...]
    psi_labels: tuple[str, ...] = None
    codes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        psi_of = tuple(str(p) for p in self.psi_of)
        if self.psi_labels is None:
            labels = tuple(dict.fromkeys(psi_of))
        else:
            labels = _labels(self.psi_labels, "psi")
        index = {lab: i for i, lab in enumerate(labels)}
        missing = [p for p in psi_of if p not in index]
        if missing:
            raise ValidationError(f"psi value {missing[0]!r} is not among psi_labels")
        codes = np.array([index[p] for p in psi_of], dtype=np.intp)
        counts = np.bincount(codes, minlength=len(labels))
        if np.any(counts == 0):
            lab = labels[int(np.argmin(counts))]
            raise ValidationError(f"psi label {lab!r} has no preimage")
        codes.setflags(write=False)
        object.__setattr__(self, "psi_of", psi_of)
        object.__setattr__(self, "psi_labels", labels)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def identity(cls, model: DiscreteModel) -> "Marginalization":
        return cls(model.theta_labels)

    def __len__(self) -> int:
        return len(self.psi_labels)

    def psi_index(self, label: str) -> int:
        try:
            return self.psi_labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown psi label {label!r}") from None

    def preimage(self, label: str) -> np.ndarray:
        return self.codes == self.psi_index(label)


def resolve(model: DiscreteModel, marg: Marginalization | None) -> Marginalization:
    if marg is None:
        return Marginalization.identity(model)
    if len(marg.psi_of) != model.n_theta:
        raise ValidationError(
            f"marginalization covers {len(marg.psi_of)} theta points, model has {model.n_theta}"
        )
    return marg


def joint_column(model: DiscreteModel, x: str) -> np.ndarray:
    """Prior-times-likelihood weights ``pi(theta) f_theta(x)``."""
    return model.prior * model.likelihood[:, model.x_index(x)]


def predictive(weights: np.ndarray, model: DiscreteModel, x: str) -> float:
    """Predictive probability of ``x`` when ``weights`` is the prior."""
    return float(np.dot(weights, model.likelihood[:, model.x_index(x)]))


def posterior(model: DiscreteModel, x: str) -> Distribution:
    joint = joint_column(model, x)
    m = joint.sum()
    if m <= 0:
        raise ZeroPredictive(f"observed {x!r} has prior predictive probability 0")
    return Distribution(model.theta_labels, joint / m)


def prior_predictive(model: DiscreteModel) -> Distribution:
    return Distribution(model.x_labels, model.prior @ model.likelihood)


def marginal_prior(model: DiscreteModel, marg: Marginalization | None = None) -> Distribution:
    marg = resolve(model, marg)
    w = np.bincount(marg.codes, weights=model.prior, minlength=len(marg))
    return Distribution(marg.psi_labels, w)


def marginal_posterior(model: DiscreteModel, marg: Marginalization | None, x: str) -> Distribution:
    marg = resolve(model, marg)
    post = posterior(model, x)
    w = np.bincount(marg.codes, weights=post.weights, minlength=len(marg))
    return Distribution(marg.psi_labels, w)


def conditional_prior(model: DiscreteModel, marg: Marginalization | None, psi0: str) -> Distribution:
    marg = resolve(model, marg)
    on = marg.preimage(psi0)
    mass = model.prior[on].sum()
    if mass <= 0:
        raise ZeroPriorMass(f"psi value {psi0!r} has prior mass 0")
    w = np.where(on, model.prior, 0.0) / mass
    return Distribution(model.theta_labels, w)


def conditional_prior_predictive(
    model: DiscreteModel, marg: Marginalization | None, psi0: str, x: str
) -> float:
    return predictive(conditional_prior(model, marg, psi0).weights, model, x)


def parse_model(data: Mapping) -> tuple[DiscreteModel, Marginalization]:
    """Build a model and marginalization from the JSON model-file layout."""
    for key in ("theta", "prior", "x", "likelihood"):
        if key not in data:
            raise ValidationError(f"model file is missing field {key!r}")
    model = DiscreteModel(data["theta"], data["prior"], data["x"], data["likelihood"])
    psi = data.get("psi")
    if psi is None:
        marg = Marginalization.identity(model)
    else:
        marg = resolve(model, Marginalization(psi, data.get("psi_labels")))
    return model, marg


def load_model(path: str | Path) -> tuple[DiscreteModel, Marginalization]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read model file {str(path)!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model file {str(path)!r} is not valid JSON: {exc}") from None
    return parse_model(data)


def theta_vector(model: DiscreteModel, values: Mapping[str, float] | Sequence[float]) -> np.ndarray:
    """Align per-theta values given as a mapping or a sequence with the model grid."""
    if isinstance(values, Mapping):
        out = np.zeros(model.n_theta)
        for lab, v in values.items():
            out[model.theta_index(lab)] = float(v)
        return out
    out = np.asarray(values, dtype=float)
    if out.shape != (model.n_theta,):
        raise ValidationError(f"expected {model.n_theta} values, got shape {out.shape}")
    return out
