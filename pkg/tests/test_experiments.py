import json
from math import comb

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from lmpersist.complex import sample_filtration
from lmpersist.experiments import (
    ObservableError,
    TrialConfig,
    mc_diagonal_mass,
    mc_persistent_betti,
    observable_integral,
    observable_limit_integral,
    lifetime_limit_1d,
    parse_observable,
    rank_experiment,
    rho_distance,
    rho_of_cdf,
    rho_pairs,
    tail_mass,
)
from lmpersist.limits import xi_hat_cdf
from lmpersist.persistence import reduce_diagram, persistent_betti


def test_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(n=10, trials=0)
    with pytest.raises(ValueError):
        TrialConfig(n=10, r_list=[])


def test_betti_r_zero_and_reproducible():
    cfg = TrialConfig(n=60, k=1, trials=4, seed0=3, r_list=[0.0, 1.0], s_list=[1.5, 1.0])
    rep = mc_persistent_betti(cfg)
    assert (rep.per_trial[:, 0] == 0).all()
    assert rep.to_json() == mc_persistent_betti(cfg).to_json()
    # r = s: the ordinary Betti number of Y(s)
    for t in range(4):
        F = sample_filtration(60, 1, cfg.trial_seed(t))
        assert rep.per_trial[t, 1] * 60 == persistent_betti(F, 1.0, 1.0)


def test_rho_pairs_and_limit_zero():
    pairs = rho_pairs(10)
    assert pairs[:4].tolist() == [[0, 0], [0, 0.5], [0.5, 0], [0, 1.0]]
    assert rho_of_cdf(lambda r, s: xi_hat_cdf(1, r, s), 1) == 0.0


@given(st.integers(0, 1000))
def test_rho_bounded(seed):
    D = reduce_diagram(sample_filtration(15, 1, seed))
    assert 0 <= rho_distance(D, 1) <= 2


def test_diagonal_identities():
    rep = mc_diagonal_mass(TrialConfig(n=40, k=1, trials=5, seed0=1))
    assert (rep.per_trial[:, 3] == 1).all()
    assert np.array_equal(rep.per_trial[:, 0], rep.per_trial[:, 1])
    assert np.array_equal(rep.per_trial[:, 0], rep.per_trial[:, 2])


def test_observable_language():
    f = parse_observable("s - r")
    assert f(1.0, 3.0) == 2.0
    assert parse_observable("exp(-2*s) + min(s, 3)**2 / 2")(0.0, 4.0) == pytest.approx(np.exp(-8) + 4.5)
    for bad in ["exp(s)", "r**-1", "1/r", "__import__('os')", "x", "min(r, s)", "r**s", "abs(r)"]:
        with pytest.raises(ObservableError):
            parse_observable(bad)


def test_observable_on_diagrams():
    D2 = reduce_diagram(sample_filtration(2, 1, 0))
    assert observable_integral(D2, "s - r") == 0.0
    D = reduce_diagram(sample_filtration(20, 1, 4))
    assert observable_integral(D, "1") == pytest.approx(1.0)
    val = observable_integral(D, "min(s - r, 1)")
    assert 0.0 <= val <= 1.0


@pytest.mark.slow
def test_lifetime_limit_two_methods():
    two_d = observable_limit_integral(1, "s - r")
    assert abs(two_d.value - lifetime_limit_1d(1)) < 2e-4
    assert two_d.tail_mass < 1e-5


def test_limit_integral_of_one():
    res = observable_limit_integral(1, "1", cutoff=16.0, h0=0.2)
    assert res.value == pytest.approx(1.0, abs=1e-5)


def test_rank_experiment_small():
    rep = rank_experiment(1, 0.0, 0.0, 50, 2)
    assert (rep.per_trial[:, 0] == 0).all()
    rep = rank_experiment(1, 0.0, 1.5, 120, 3)
    assert (rep.per_trial[:, 1] >= rep.per_trial[:, 0]).all()
    assert rep.to_dict()["schema"] == 1


def test_tail_mass_edges():
    rep = tail_mass(TrialConfig(n=30, k=1, trials=3), [0.0, 2.0, 4.0, 30.0])
    assert (rep.per_trial[:, 0] == 1).all()
    assert (rep.per_trial[:, 3] == 0).all()
    assert rep.mean[2] <= rep.mean[1]


def test_report_formats():
    rep = mc_persistent_betti(TrialConfig(n=30, trials=2, tolerances={"betti": 0.5}))
    d = json.loads(rep.to_json())
    assert d["schema"] == 1 and d["quantities"][0]["pass"] is True
    assert rep.to_csv().splitlines()[0].startswith("trial,")
    assert "PASS" in rep.to_text()
