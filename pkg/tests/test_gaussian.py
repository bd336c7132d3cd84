import math

import numpy as np
import pytest

from oracles import normal_evidence
from relbelief.errors import DegenerateData, GridTooCoarse, ValidationError
from relbelief.gaussian import (
    GridResolution,
    NormalConjugateSpec,
    SufficientStat,
    bf_normal,
    diffuse_scan,
    grid_bridge,
    info_inconsistency_limit,
    log_bf_normal,
    log_rb_normal,
    posterior_location,
    rb_normal,
)

REF = NormalConjugateSpec(mu0=0.0, tau2=1.0, alpha0=1.0, beta0=1.0, n=10)

# frozen from the quadrature oracle in tests/oracles.py
FROZEN = [
    (0.0, 3.3166247903554003, 3.828320307517794),
    (1.2, 0.04295858007142345, 0.03263182226298689),
    (3.0, 0.00015563480315288123, 5.928629367457344e-05),
]


@pytest.mark.parametrize("xbar, bf, rb", FROZEN)
def test_frozen_reference_values(xbar, bf, rb):
    stat = SufficientStat(xbar, 9.0)
    assert float(bf_normal(REF, stat)) == pytest.approx(bf, rel=1e-12)
    assert float(rb_normal(REF, stat)) == pytest.approx(rb, rel=1e-12)


def test_quadrature_oracle_off_reference():
    spec = NormalConjugateSpec(2.0, 0.5, 1.5, 2.0, 7)
    stat = SufficientStat(2.9, 4.0)
    bf, rb = normal_evidence(2.0, 0.5, 1.5, 2.0, 7, 2.9, 4.0)
    assert float(bf_normal(spec, stat)) == pytest.approx(bf, rel=1e-8)
    assert float(rb_normal(spec, stat)) == pytest.approx(rb, rel=1e-8)


def test_logs_agree():
    stat = SufficientStat(0.7, 5.0)
    assert math.exp(log_bf_normal(REF, stat)) == pytest.approx(float(bf_normal(REF, stat)), rel=1e-14)
    assert math.exp(log_rb_normal(REF, stat)) == pytest.approx(float(rb_normal(REF, stat)), rel=1e-14)


def test_bf_at_prior_mean_is_exact():
    for n, tau2 in [(1, 0.3), (10, 1.0), (50, 7.0)]:
        spec = NormalConjugateSpec(1.0, tau2, 2.0, 1.0, n)
        assert float(bf_normal(spec, SufficientStat(1.0, 3.0))) == math.sqrt(1 + n * tau2)


def test_information_inconsistency():
    lim = info_inconsistency_limit(REF)
    assert lim == pytest.approx(11 ** (-5.5), rel=1e-14)
    values = [float(bf_normal(REF, SufficientStat(d, 9.0))) for d in (1e2, 1e4, 1e6)]
    assert abs(values[-1] / lim - 1) < 1e-9
    rbs = [float(rb_normal(REF, SufficientStat(d, 9.0))) for d in (1e2, 1e4, 1e6)]
    assert rbs[0] > rbs[1] > rbs[2] and rbs[1] < 1e-6


def test_diffuse_scan_rows():
    stat = SufficientStat(1.2, 9.0)
    rows = diffuse_scan(REF, stat, [1.0, 10.0, 100.0])
    assert [r.tau2 for r in rows] == [1.0, 10.0, 100.0]
    assert rows[0].rb == pytest.approx(FROZEN[1][2], rel=1e-12)
    with pytest.raises(ValidationError):
        diffuse_scan(REF, stat, [0.0])


def test_sufficient_statistics():
    x = [1.0, 2.0, 4.0]
    stat = SufficientStat.from_sample(x)
    assert stat.xbar == pytest.approx(7 / 3)
    assert stat.s2 == pytest.approx(np.var(x) * 3)
    assert SufficientStat.from_variance(1.0, 2.0, 5).s2 == 8.0
    with pytest.raises(ValidationError):
        SufficientStat(0.0, -1.0)


def test_posterior_location_shrinks():
    assert posterior_location(REF, SufficientStat(1.1, 1.0)) == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs", [dict(tau2=0.0), dict(alpha0=-1.0), dict(n=0), dict(p=1.0), dict(n=2.5)])
def test_spec_validation(kwargs):
    base = dict(mu0=0.0, tau2=1.0, alpha0=1.0, beta0=1.0, n=10)
    with pytest.raises(ValidationError):
        NormalConjugateSpec(**(base | kwargs))


def test_degenerate_data_unreachable_with_valid_prior():
    spec = NormalConjugateSpec(0.0, 1.0, 1.0, 1e-300, 3)
    object.__setattr__(spec, "beta0", 0.0)
    with pytest.raises(DegenerateData):
        bf_normal(spec, SufficientStat(0.0, 0.0))


def test_grid_bridge_converges():
    stat = SufficientStat(1.2, 9.0)
    exact = float(rb_normal(REF, stat))
    bridge = grid_bridge(REF, stat, GridResolution(120, 120))
    assert bridge.captured_prior_mass > 0.999
    assert bridge.rb() == pytest.approx(exact, rel=1e-3)


def test_grid_bridge_other_design():
    spec = NormalConjugateSpec(1.0, 4.0, 2.0, 3.0, 25)
    stat = SufficientStat(2.2, 30.0)
    assert grid_bridge(spec, stat, GridResolution(300, 300)).rb() == pytest.approx(float(rb_normal(spec, stat)), rel=1e-4)


def test_grid_single_mean_cell():
    bridge = grid_bridge(REF, SufficientStat(1.2, 9.0), GridResolution(1, 50, min_captured=0.0))
    assert bridge.rb() == pytest.approx(1.0, abs=1e-12)


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        grid_bridge(REF, SufficientStat(1.2, 9.0), GridResolution(2, 2))
