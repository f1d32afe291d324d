import json
import math

import numpy as np
import pytest

from truncvar import analytics as an
from truncvar.engine import dtv_exact, tv_exact, utv_exact
from truncvar.montecarlo import (
    ExperimentConfig,
    RenewalInputs,
    load_config,
    run_experiment,
    run_renewal_clt,
    verify_laplace,
)
from truncvar.montecarlo.experiments import BETA, _episodes, _prefix_values, corrected_c, stream
from truncvar.montecarlo.stats import ks_two_sample
from truncvar.paths import ParameterError, Path, simulate_values

G = [0.25, 0.5, 1.0]


def cfg(**kw):
    return ExperimentConfig.from_dict(kw)


SMALL = dict(experiment="SMALL_C_TV", c=0.1, mu=0.5, step_dt=1e-4, replicates=200, time_grid=G)


# --- configuration -----------------------------------------------------------

@pytest.mark.parametrize(
    "field,doc",
    [
        ("replicates", dict(SMALL, replicates=50)),
        ("step_dt", dict(SMALL, step_dt=1e-3)),
        ("time_grid", dict(SMALL, time_grid=[0.5, 0.25])),
        ("time_grid", dict(SMALL, time_grid=[0.5, 2.0])),
        ("time_grid", dict(SMALL, time_grid=[0.0, 1.0])),
        ("experiment", dict(SMALL, experiment="BOGUS")),
        ("side", dict(SMALL, side="left")),
        ("mu", dict(experiment="SCALING_CHECK", c=1, mu=0.2, n_scale=4)),
        ("n_scale", dict(experiment="SCALING_CHECK", c=1, n_scale=1)),
        ("renewal", dict(experiment="RENEWAL_CLT")),
        ("c", dict(SMALL, c=-1.0)),
        ("master_seed", dict(SMALL, master_seed=-3)),
        ("colour", dict(SMALL, colour="red")),
        ("thresholds", dict(SMALL, thresholds={"ks_alpha": 0.01, "bogus": 1})),
    ],
)
def test_config_rejects(field, doc):
    with pytest.raises(ParameterError, match=field):
        ExperimentConfig.from_dict(doc)


def test_config_round_trip(tmp_path):
    c = cfg(**SMALL, thresholds={"ks_alpha": 0.01})
    assert c.thresholds.ks_alpha == 0.01
    p = tmp_path / "c.json"
    p.write_text(json.dumps(c.to_dict()))
    assert load_config(p) == c
    assert c.replace(c=0.2).c == 0.2
    with pytest.raises(ParameterError):
        ExperimentConfig.from_json("[1, 2]")
    with pytest.raises(ParameterError):
        ExperimentConfig.from_json("{not json")


def test_parametric_renewal_allows_coarse_dt():
    doc = dict(experiment="RENEWAL_CLT", c=0.01, step_dt=0.5, renewal={"d": {"family": "exponential"}, "z": {"family": "exponential"}})
    assert cfg(**doc).step_dt == 0.5
    with pytest.raises(ParameterError, match="step_dt"):
        cfg(**dict(doc, renewal={"family": "brownian_cycles"}))


def test_as_limit_single_replicate():
    assert cfg(experiment="AS_LIMIT", c=0.1, step_dt=1e-4, replicates=1).replicates == 1


# --- the simulated prefix values are the engine's -----------------------------

@pytest.mark.parametrize("correction", [True, False])
def test_prefix_values_match_engine(correction):
    c = cfg(**SMALL, continuity_correction=correction)
    out, counts, fine = _prefix_values(c, c.mu, c.c, c.step_dt, c.horizon_T, np.asarray(G), (), 2, richardson=True)
    ce = corrected_c(c.c, c.step_dt, correction)
    ce_fine = corrected_c(c.c, c.step_dt / 2, correction)
    assert (ce < c.c) == correction
    for r in (0, 7, 199):
        x = simulate_values(stream(c.master_seed, r), c.mu, c.step_dt, 10_000)
        for j, t in enumerate(G):
            k = round(t / c.step_dt)
            p = Path.from_values(x[: k + 1], c.step_dt)
            got = out[r, j]
            assert got[0] == pytest.approx(tv_exact(p, ce).value, abs=1e-9)
            assert got[1] == pytest.approx(utv_exact(p, ce).value, abs=1e-9)
            assert got[2] == pytest.approx(dtv_exact(p, ce).value, abs=1e-9)
        # the refined path passes through the coarse one
        assert fine[r, -1, 0] >= tv_exact(Path.from_values(x), ce_fine).value - 1e-9


def test_continuity_correction_constant():
    from scipy.special import zeta

    assert BETA == pytest.approx(-zeta(0.5) / math.sqrt(2 * math.pi), rel=1e-15)
    with pytest.raises(ParameterError):
        corrected_c(0.01, 1e-3)
    assert corrected_c(0.01, 1e-3, enabled=False) == 0.01


# --- determinism ---------------------------------------------------------------

def test_reports_independent_of_threads():
    c = cfg(**SMALL)
    a = run_experiment(c, threads=1).to_json()
    b = run_experiment(c, threads=5).to_json()
    assert a == b
    assert run_experiment(c, threads=3).to_json() == a
    assert run_experiment(c.replace(master_seed=2), threads=3).to_json() != a


def test_laplace_independent_of_threads():
    c = cfg(experiment="LAPLACE_CHECK", c=0.3, mu=0.5, step_dt=9e-4, replicates=45_000)
    assert verify_laplace(c, threads=1).to_json() == verify_laplace(c, threads=4).to_json()


def test_renewal_independent_of_threads():
    c = cfg(experiment="RENEWAL_CLT", horizon_T=20, time_grid=[5, 20], replicates=300,
            renewal={"d": {"family": "gamma", "mean": 1, "shape": 2}, "z": {"family": "uniform", "low": 0, "high": 2}})
    assert run_experiment(c, threads=1).to_json() == run_experiment(c, threads=4).to_json()


# --- campaign behaviour -------------------------------------------------------

def test_small_c_report_contents():
    rep = run_experiment(cfg(**SMALL), threads=4)
    doc = json.loads(rep.to_json())
    assert doc["generator"]
    assert doc["config"]["c"] == 0.1 and doc["config"]["continuity_correction"] is True
    assert [p["t"] for p in doc["time_points"]] == G
    assert {c["name"] for c in doc["checks"]} == {
        "terminal_mean", "terminal_variance", "terminal_ks", "covariance", "richardson_shift"}
    assert len(doc["covariance"]["empirical"]) == 3
    assert "wall_clock_s" not in doc
    assert rep.wall_clock_s > 0
    assert doc["notes"]
    csv = rep.samples_csv().decode().splitlines()
    assert csv[0] == "replicate,stat" and len(csv) == 201
    assert float(csv[1].split(",")[1]) == rep.terminal_samples[0]
    # the statistic is sqrt(3) (TV - T/c); its raw variance is near 1/3
    assert rep.terminal["var"] == pytest.approx(3 * rep.terminal["raw_var"])


def test_huge_c_is_flagged():
    rep = run_experiment(cfg(experiment="SMALL_C_TV", c=50.0, step_dt=1e-2, replicates=100, richardson=False))
    assert "non_asymptotic_regime" in rep.to_dict()["flags"]
    ce = corrected_c(50.0, 1e-2)
    # TV is identically zero, so the statistic is the bare centring term
    np.testing.assert_allclose(rep.terminal_samples, -math.sqrt(3) / 50.0, rtol=1e-12)
    assert ce < 50.0
    assert not rep.passed


def test_one_sided_side_and_reflection():
    up = cfg(experiment="TIME_RESCALE_UTV", c=1, mu=0.3, n_scale=30, step_dt=0.02, replicates=600)
    down = up.replace(side="down", mu=-0.3, master_seed=9)
    ru, rd = run_experiment(up), run_experiment(down)
    assert ru.targets["kind"] == "UTV" and rd.targets["kind"] == "DTV"
    assert rd.targets["limit_mean"] == pytest.approx(an.utv_limit_mean(1, 0.3))
    assert ks_two_sample(ru.terminal_samples, rd.terminal_samples)[1] > 1e-3


def test_small_c_dtv_centering():
    rep = run_experiment(cfg(**dict(SMALL, experiment="SMALL_C_UTV", side="down", richardson=False)))
    assert rep.targets["centering_rate"] == pytest.approx(1 / 0.2 - 0.25)


def test_as_limit_small():
    rep = run_experiment(cfg(experiment="AS_LIMIT", c=0.05, step_dt=2.5e-5, replicates=2, time_grid=[i / 20 for i in range(1, 21)],
                             thresholds={"as_sup_tol": 0.1, "as_band": 0.1}))
    assert rep.passed, rep.to_json()
    assert len(rep.extra["sup_abs_c_tv_minus_t"]) == 2


def test_as_limit_rescale():
    rep = run_experiment(cfg(experiment="AS_LIMIT", c=1, mu=1, n_scale=100, step_dt=0.01, replicates=3,
                             thresholds={"as_band": 0.1}))
    assert rep.targets["m_tv"] == pytest.approx(1 / math.tanh(1))
    assert rep.passed


def test_laplace_small():
    rep = verify_laplace(cfg(experiment="LAPLACE_CHECK", c=0.3, step_dt=9e-4, replicates=20_000))
    assert rep.check("normalization").value == 1.0
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.extra["abandoned_episodes"] == 0
    assert len(rep.extra["laplace_tv"]) == 6
    ft = rep.extra["fourth_moments"]["T_D"]
    assert abs(ft["estimate"] - ft["target"]) < 5 * ft["se"]


def test_laplace_rejects_invalid_point():
    with pytest.raises(ParameterError, match="laplace_tv_grid"):
        verify_laplace(cfg(experiment="LAPLACE_CHECK", c=0.3, step_dt=9e-4, replicates=100, laplace_tv_grid=[[50.0, 1.0]]))


def test_incomplete_episodes_are_counted():
    c = cfg(experiment="LAPLACE_CHECK", c=0.1, step_dt=2e-4, replicates=100, continuity_correction=False)
    # E T_D is about 2.4e4 here, far beyond the cap of 1e6 c^2 = 1e4
    T, M, Mb, rise, abandoned, ce = _episodes(c, 0.1, 100.0, 1e-2, 3, threads=1)
    assert abandoned == 3
    assert np.all(np.isnan(T))


def test_incomplete_episodes_fail_the_report(monkeypatch):
    from truncvar.montecarlo import experiments

    # cap at 5 c^2 while E T_D is about 6 c^2: some episodes finish, some do not
    monkeypatch.setattr(experiments, "_EPISODE_CAP_TIME", 5.0)
    c = cfg(experiment="LAPLACE_CHECK", c=0.1, mu=20.0, step_dt=2e-4, replicates=400,
            laplace_tv_grid=[[0.0, 1.0]], laplace_utv_grid=[[0.0, 1.0]])
    rep = verify_laplace(c)
    n_bad = rep.extra["abandoned_episodes"]
    assert 0 < n_bad < 400
    assert "incomplete_episodes" in rep.to_dict()["flags"]
    assert not rep.check("complete_episodes").passed
    assert not rep.passed


def test_scaling_check_small():
    rep = run_experiment(cfg(experiment="SCALING_CHECK", c=1, n_scale=25, step_dt=0.01, replicates=400))
    assert rep.targets["c_small"] == pytest.approx(0.2)
    assert rep.targets["step_dt_small"] == pytest.approx(4e-4)
    assert rep.check("two_sample_ks").passed


# --- renewal ------------------------------------------------------------------

def test_renewal_targets():
    inp = RenewalInputs.from_dict({"d": {"family": "exponential", "mean": 1}, "z": {"family": "exponential", "mean": 1}})
    assert inp.f == 1.0 and inp.sigma2 == 2.0
    inp = RenewalInputs.from_dict({"d": {"family": "gamma", "mean": 2, "shape": 4}, "z": {"family": "uniform", "low": 1, "high": 3}})
    # X = Z - f D with f = 1; E X^2 = Var Z + Var D
    assert inp.sigma2 == pytest.approx((4 / 12 + 4 / 4) / 2)
    with pytest.raises(ParameterError):
        RenewalInputs.from_dict({"d": {"family": "cauchy"}})
    with pytest.raises(ParameterError):
        RenewalInputs.from_dict({"d": {"family": "exponential"}, "coupling": "sideways"})


@pytest.mark.parametrize(
    "renewal",
    [
        {"d": {"family": "deterministic", "mean": 0.5}, "z": {"family": "deterministic", "mean": 2}},
        {"d": {"family": "exponential", "mean": 1}, "coupling": "identical"},
    ],
    ids=["deterministic", "identical"],
)
def test_degenerate_renewals_are_flagged(renewal):
    rep = run_experiment(cfg(experiment="RENEWAL_CLT", horizon_T=50, time_grid=[10, 50], replicates=500, renewal=renewal))
    doc = rep.to_dict()
    assert rep.targets["sigma2"] == 0.0
    assert "zero_variance_target" in doc["flags"]
    assert rep.passed
    # only the boundary term is left: a single reward at most
    assert rep.terminal["var"] / 50 < 0.1


def test_deterministic_renewal_path():
    inp = RenewalInputs.from_dict({"d": {"family": "deterministic", "mean": 0.5}, "z": {"family": "deterministic", "mean": 2}})
    c = cfg(experiment="RENEWAL_CLT", horizon_T=50, time_grid=[10, 50], replicates=100, renewal=inp.to_dict())
    rep = run_renewal_clt(inp, c)
    # M(t) = floor(t / 0.5) + 1 so P(t) = 2 (2t + 1) - 4t = 2 exactly at these t
    np.testing.assert_allclose(rep.terminal_samples, 2.0)
    assert "zero_empirical_variance" in rep.flags


def test_renewal_stochastic():
    rep = run_experiment(cfg(experiment="RENEWAL_CLT", horizon_T=50, time_grid=[10, 25, 50], replicates=1000,
                             renewal={"d": {"family": "exponential"}, "z": {"family": "exponential"}}))
    assert rep.check("terminal_variance").passed
    assert rep.terminal["var"] == pytest.approx(100, rel=0.15)


def test_renewal_from_brownian_cycles():
    # sigma^2 -> 1/3 as c -> 0
    c = cfg(experiment="RENEWAL_CLT", c=0.1, mu=0.0, step_dt=1e-4, horizon_T=10, time_grid=[5, 10], replicates=400,
            renewal={"family": "brownian_cycles"})
    rep = run_experiment(c, threads=4)
    assert rep.targets["sigma2"] == pytest.approx(1 / 3)
    assert rep.targets["f"] == pytest.approx(10.0)
    assert rep.check("terminal_variance").passed, rep.check("terminal_variance")
    assert rep.terminal["var"] / 10 == pytest.approx(1 / 3, rel=0.15)
