import numpy as np
import pytest

from zctiming import simulation
from zctiming.analytics import DetectionScenario, metric_mean, metric_var
from zctiming.correlation import correlator_bank
from zctiming.sequences import zc_generate
from zctiming.simulation import (
    SimulationConfig,
    complex_gaussian,
    detect_timing,
    run_experiment,
    synthesize_received,
    trial_rng,
    truncate_cp,
)


def scenario(mu=140, W=16, dl=0.5, eta_db=-15):
    return DetectionScenario.from_db(839, mu, W, dl, eta_db)


def test_config_defaults_and_validation():
    c = SimulationConfig(scenario())
    assert c.n_cp == 15 and c.trials == 10_000 and c.kappa_mode == "uniform"
    assert SimulationConfig(scenario(), kappa_mode="3").kappa_mode == 3
    for kw, msg in [
        (dict(n_cp=14), "N_CP"),
        (dict(trials=0), "trials"),
        (dict(seed=-1), "seed"),
        (dict(seed=2**64), "seed"),
        (dict(kappa_mode=16), "fixed kappa"),
        (dict(kappa_mode="often"), "kappa_mode"),
        (dict(sequence="gold"), "sequence"),
    ]:
        with pytest.raises(ValueError, match=msg):
            SimulationConfig(scenario(), **kw)


def test_complex_gaussian_moments():
    z = complex_gaussian(trial_rng(0, 0), 200_000)
    assert abs(z.mean()) < 0.01
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.01)
    assert abs(np.mean(z * z)) < 0.01


def test_truncated_block_is_rotated_cyclic_shift():
    x = np.asarray(zc_generate(839, 140))
    y = truncate_cp(synthesize_received(x, 5, 0.3, 4.0, 15), 15, 839)
    n = np.arange(839)
    expected = 2.0 * np.roll(x, 5) * np.exp(2j * np.pi * 0.3 * (n + 15) / 839)
    np.testing.assert_allclose(y, expected, atol=1e-12)


def test_truncate_and_synthesize_validation():
    x = np.asarray(zc_generate(139, 3))
    with pytest.raises(ValueError):
        synthesize_received(x, 16, 0.0, 1.0, 15)
    with pytest.raises(ValueError):
        truncate_cp(np.ones(10), 15)
    with pytest.raises(ValueError):
        truncate_cp(np.ones(20), 15, N=10)


@pytest.mark.parametrize("mu,dl,kappa,expected", [(140, 0.0, 7, 7), (140, 0.7, 0, 6), (367, 0.7, 0, 0)])
def test_noiseless_detection(mu, dl, kappa, expected):
    x = np.asarray(zc_generate(839, mu))
    y = truncate_cp(synthesize_received(x, kappa, dl, 1.0, 15), 15)
    assert detect_timing(y, x, 16) == expected


def test_detect_ties_go_to_smallest():
    x = np.asarray(zc_generate(139, 3))
    assert detect_timing(np.zeros(139, complex), x, 5) == 0


def test_noiseless_experiment_has_no_errors():
    emp = run_experiment(SimulationConfig(scenario(dl=0.0, eta_db=60), trials=100, seed=3))
    assert emp.error_rate == 0.0 and emp.counts == {0: 100}


def test_determinism_and_batching(monkeypatch):
    cfg = SimulationConfig(scenario(), trials=300, seed=11)
    a = run_experiment(cfg)
    assert run_experiment(cfg) == a
    monkeypatch.setattr(simulation, "_BATCH", 7)
    assert run_experiment(cfg) == a
    assert run_experiment(SimulationConfig(scenario(), trials=300, seed=12)) != a


def test_fixed_kappa_reaches_only_its_offsets():
    emp = run_experiment(SimulationConfig(scenario(eta_db=-25), trials=2000, seed=2, kappa_mode=4))
    assert min(emp.counts) >= -4 and max(emp.counts) <= 11
    assert sum(emp.frequencies().values()) == pytest.approx(1.0)


def test_noise_is_white_across_hypotheses():
    x = np.asarray(zc_generate(839, 140))
    T = 10_000
    z = np.empty((T, 16), complex)
    for t in range(T):
        y = truncate_cp(synthesize_received(x, 0, 0.0, 0.0, 15, trial_rng(5, t)), 15)
        z[t] = correlator_bank(y, x, 16)
    z *= np.sqrt(839)  # unit variance per hypothesis
    C = (z.conj().T @ z) / T
    off = np.abs(C[~np.eye(16, dtype=bool)])
    assert off.max() < 5 / np.sqrt(T)


@pytest.mark.parametrize("dk", [0, 6, 3])
def test_metric_moments_match_analysis(dk):
    s = scenario(dl=0.5, eta_db=-15)
    x = np.asarray(zc_generate(839, 140))
    T = 10_000
    zeta = np.empty(T)
    for t in range(T):
        y = truncate_cp(synthesize_received(x, 2, s.delta_lambda, s.eta, 15, trial_rng(9, t)), 15)
        zeta[t] = abs(correlator_bank(y, x, 16)[2 + dk]) ** 2
    m, v = metric_mean(dk, s), metric_var(dk, s)
    assert abs(zeta.mean() - m) < 3 * np.sqrt(v / T)
    # standard error of the sample variance needs the fourth moment
    se_var = np.sqrt(np.var((zeta - zeta.mean()) ** 2) / T)
    assert abs(zeta.var() - v) < 3 * se_var


def test_error_floor_root_367():
    emp = run_experiment(SimulationConfig(scenario(mu=367, W=20, dl=0.6, eta_db=0), trials=10_000, seed=0))
    assert emp.error_rate == pytest.approx(0.2, abs=0.015)


def test_pn_and_random_phase_run():
    emp = run_experiment(SimulationConfig(scenario(dl=0.0, eta_db=10), trials=200, seed=1,
                                          sequence="pn", random_phase=True))
    assert emp.error_rate == 0.0
    assert emp.stderr == 0.0
