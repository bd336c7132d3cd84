"""Evidence about a normal mean under the normal-inverse-gamma prior.

Data ``x_1..x_n ~ N(mu, sigma2)`` are summarized by the sample mean and the
centered sum of squares ``s2 = sum((x_i - xbar)**2)``.  The prior is
``mu | sigma2 ~ N(mu0, tau2 * sigma2)`` and ``1/sigma2 ~ Gamma(alpha0,
rate=beta0)``.  For the hypothesis ``mu == mu0`` this module gives

* :func:`bf_normal`, the Bayes factor under the mixture prior that adds a
  lump ``p`` at ``mu0`` (the value does not depend on ``p``);
* :func:`rb_normal`, the relative belief ratio under the continuous prior,
  the ratio of the Student-t marginal posterior and prior densities of
  ``mu`` at ``mu0``;
* :func:`grid_bridge`, a finite-grid version of the continuous model on
  which :mod:`relbelief.evidence` reproduces :func:`rb_normal`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .errors import DegenerateData, GridTooCoarse, ValidationError
from .evidence import EvidenceValue, rb_marginal
from .model import DiscreteModel, Marginalization


@dataclass(frozen=True)
class NormalConjugateSpec:
    mu0: float
    tau2: float
    alpha0: float
    beta0: float
    n: int
    p: float = 0.5

    def __post_init__(self):
        if not (self.tau2 > 0 and self.alpha0 > 0 and self.beta0 > 0):
            raise ValidationError("tau2, alpha0 and beta0 must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n must be a positive integer")
        if not 0.0 < self.p < 1.0:
            raise ValidationError("p must lie in (0, 1)")
        object.__setattr__(self, "n", int(self.n))

    def with_tau2(self, tau2: float) -> "NormalConjugateSpec":
        return NormalConjugateSpec(self.mu0, tau2, self.alpha0, self.beta0, self.n, self.p)


@dataclass(frozen=True)
class SufficientStat:
    """Sample mean and centered sum of squares (not the sample variance)."""

    xbar: float
    s2: float

    def __post_init__(self):
        if not self.s2 >= 0:
            raise ValidationError("s2 must be nonnegative")

    @classmethod
    def from_sample(cls, x: Sequence[float]) -> "SufficientStat":
        x = np.asarray(x, dtype=float)
        xbar = float(x.mean())
        return cls(xbar, float(((x - xbar) ** 2).sum()))

    @classmethod
    def from_variance(cls, xbar: float, variance: float, n: int) -> "SufficientStat":
        return cls(xbar, variance * (n - 1))


def _check(spec: NormalConjugateSpec, stat: SufficientStat) -> tuple[float, float]:
    d = stat.xbar - spec.mu0
    total = spec.n * d * d + stat.s2 + 2.0 * spec.beta0
    if total <= 0:
        raise DegenerateData("n (xbar - mu0)^2 + s2 + 2 beta0 is zero")
    return d, total


def log_bf_normal(spec: NormalConjugateSpec, stat: SufficientStat) -> float:
    d, total = _check(spec, stat)
    shrink = 1.0 + spec.n * spec.tau2
    nd2 = spec.n * d * d
    bracket = (nd2 / shrink + stat.s2 + 2.0 * spec.beta0) / total
    return 0.5 * math.log(shrink) + (spec.n / 2.0 + spec.alpha0) * math.log(bracket)


def bf_normal(spec: NormalConjugateSpec, stat: SufficientStat) -> EvidenceValue:
    d, total = _check(spec, stat)
    shrink = 1.0 + spec.n * spec.tau2
    bracket = (spec.n * d * d / shrink + stat.s2 + 2.0 * spec.beta0) / total
    return EvidenceValue(
        math.sqrt(shrink) * math.exp((spec.n / 2.0 + spec.alpha0) * math.log(bracket)), "BF"
    )


def posterior_location(spec: NormalConjugateSpec, stat: SufficientStat) -> float:
    k = spec.n + 1.0 / spec.tau2
    return spec.mu0 + spec.n * (stat.xbar - spec.mu0) / k


def posterior_spread(spec: NormalConjugateSpec, stat: SufficientStat) -> float:
    """Twice the posterior rate of ``1/sigma2``."""
    d, _ = _check(spec, stat)
    k = spec.n + 1.0 / spec.tau2
    return spec.n * d * d / (spec.tau2 * k) + stat.s2 + 2.0 * spec.beta0


def _log_t_const(nu: float) -> float:
    return gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * math.log(nu * math.pi)


def log_rb_normal(spec: NormalConjugateSpec, stat: SufficientStat) -> float:
    d, _ = _check(spec, stat)
    n, tau2, a0, b0 = spec.n, spec.tau2, spec.alpha0, spec.beta0
    k = n + 1.0 / tau2
    nu = n + 2.0 * a0
    spread = posterior_spread(spec, stat) / k  # nu * posterior_scale**2
    shift = n * d / k  # mu(x) - mu0
    log_post = _log_t_const(nu) - 0.5 * math.log(spread / nu) - (nu + 1.0) / 2.0 * math.log1p(
        shift * shift / spread
    )
    log_prior = _log_t_const(2.0 * a0) - 0.5 * math.log(tau2 * b0 / a0)
    return log_post - log_prior


def rb_normal(spec: NormalConjugateSpec, stat: SufficientStat) -> EvidenceValue:
    return EvidenceValue(math.exp(log_rb_normal(spec, stat)), "RB")


def info_inconsistency_limit(spec: NormalConjugateSpec) -> float:
    """Limit of :func:`bf_normal` as the data move arbitrarily far from ``mu0``."""
    return math.exp((-spec.n / 2.0 - spec.alpha0 + 0.5) * math.log1p(spec.n * spec.tau2))


@dataclass(frozen=True)
class DiffuseRow:
    tau2: float
    bf: float
    rb: float


def diffuse_scan(spec: NormalConjugateSpec, stat: SufficientStat, tau2_grid: Sequence[float]) -> list[DiffuseRow]:
    rows = []
    for tau2 in tau2_grid:
        if not tau2 > 0:
            raise ValidationError("tau2 grid must be positive")
        s = spec.with_tau2(float(tau2))
        rows.append(DiffuseRow(float(tau2), float(bf_normal(s, stat)), float(rb_normal(s, stat))))
    return rows


# -- grid bridge --------------------------------------------------------------


@dataclass(frozen=True)
class GridResolution:
    """Cells per axis and the tail mass each axis may leave uncovered.

    The mean axis uses ``mu = mu0 + a * sinh(u)`` with ``u`` uniform, so cells
    are fine near ``mu0`` and the posterior and grow geometrically into the
    heavy prior tails; ``mu0`` is always a cell midpoint.  The variance axis
    is uniform in ``log sigma2``.
    """

    n_mu: int = 400
    n_sigma2: int = 400
    tail: float = 1e-12
    min_captured: float = 0.999

    def refined(self, factor: int = 2) -> "GridResolution":
        return GridResolution(self.n_mu * factor, self.n_sigma2 * factor, self.tail, self.min_captured)


@dataclass(frozen=True, eq=False)
class GridBridge:
    model: DiscreteModel
    marg: Marginalization
    psi0: str
    captured_prior_mass: float
    observed: str = "observed"

    def rb(self) -> float:
        return float(rb_marginal(self.model, self.marg, self.observed)[self.psi0])


def _axes(spec: NormalConjugateSpec, stat: SufficientStat, res: GridResolution):
    n, a0, b0, tau2 = spec.n, spec.alpha0, spec.beta0, spec.tau2
    k = n + 1.0 / tau2
    nu = n + 2.0 * a0
    beta_x = posterior_spread(spec, stat)
    mu_x = posterior_location(spec, stat)
    scale_post = math.sqrt(beta_x / (k * nu))
    scale_prior = math.sqrt(tau2 * b0 / a0)
    a = min(scale_post, scale_prior)
    reach = max(
        scale_prior * stats.t.isf(res.tail, 2.0 * a0),
        abs(mu_x - spec.mu0) + scale_post * stats.t.isf(res.tail, nu),
    )
    half = math.asinh(reach / a)
    du = 2.0 * half / res.n_mu
    u = (np.arange(res.n_mu) - res.n_mu // 2) * du
    mu = spec.mu0 + a * np.sinh(u)
    log_dmu = math.log(a) + np.log(np.cosh(u)) + math.log(du)

    sig_prior = stats.invgamma(a0, scale=b0)
    sig_post = stats.invgamma(a0 + n / 2.0, scale=beta_x / 2.0)
    sig_col = stats.invgamma(a0 + 0.5, scale=b0)
    lo = min(sig_prior.ppf(res.tail), sig_post.ppf(res.tail))
    hi = max(sig_prior.isf(res.tail), sig_post.isf(res.tail), sig_col.isf(res.tail))
    w_lo, w_hi = math.log(lo), math.log(hi)
    dw = (w_hi - w_lo) / res.n_sigma2
    w = w_lo + (np.arange(res.n_sigma2) + 0.5) * dw
    return mu, log_dmu, np.exp(w), w + math.log(dw)


def grid_bridge(
    spec: NormalConjugateSpec, stat: SufficientStat, resolution: GridResolution | None = None
) -> GridBridge:
    """Discretize the continuous prior and the sampling density on a (mu, sigma2) grid.

    Prior cell weights come from the midpoint rule in the grid coordinates.
    The data enter as the event that the statistic falls in a small fixed
    neighbourhood of its observed value, whose probability is proportional
    to the sampling density at the cell midpoint; the constant of
    proportionality cancels in every relative belief ratio.
    """
    res = resolution or GridResolution()
    if res.n_mu < 1 or res.n_sigma2 < 1:
        raise ValidationError("grid needs at least one cell per axis")
    mu, log_dmu, v, log_dv = _axes(spec, stat, res)
    M, V = np.meshgrid(mu, v, indexing="ij")
    log_w = (
        stats.norm.logpdf(M, spec.mu0, np.sqrt(spec.tau2 * V))
        + stats.invgamma.logpdf(V, spec.alpha0, scale=spec.beta0)
        + log_dmu[:, None]
        + log_dv[None, :]
    )
    weights = np.exp(log_w).ravel()
    captured = float(weights.sum())
    if not captured >= res.min_captured:
        raise GridTooCoarse(f"grid captures prior mass {captured:.6g} < {res.min_captured}")

    n = spec.n
    log_f = stats.norm.logpdf(stat.xbar, M, np.sqrt(V / n))
    if n > 1:
        log_f = log_f + stats.chi2.logpdf(stat.s2 / V, n - 1) - np.log(V)
    log_f = log_f.ravel()
    hit = np.exp(log_f - log_f.max())

    ku, kv = np.meshgrid(np.arange(res.n_mu), np.arange(res.n_sigma2), indexing="ij")
    theta = [f"mu{i}|s2{j}" for i, j in zip(ku.ravel(), kv.ravel())]
    psi_labels = tuple(f"mu{i}" for i in range(res.n_mu))
    model = DiscreteModel(
        theta,
        weights / captured,
        ("observed", "elsewhere"),
        np.column_stack([hit, 1.0 - hit]),
    )
    marg = Marginalization(tuple(psi_labels[i] for i in ku.ravel()), psi_labels)
    return GridBridge(model, marg, psi_labels[res.n_mu // 2], captured)
