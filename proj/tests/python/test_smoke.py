"""Smoke tests for the python bindings."""

import math

import pytest

import dpbandits as dpb


def test_noise_determinism():
    a = dpb.NoiseSource(1234, 7)
    b = dpb.NoiseSource(1234, 7)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]


def test_laplace_primitives():
    assert dpb.laplace_inverse_cdf(0.5, 3.0) == 0.0
    assert dpb.laplace_inverse_cdf(0.75, 1.0) == pytest.approx(math.log(2.0), rel=1e-12)
    assert dpb.laplace_tail(2.0, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert dpb.hoeffding_radius(200, 1.0, 0.05) == pytest.approx(
        math.sqrt(math.log(40.0) / 400.0), rel=1e-12
    )
    with pytest.raises(ValueError):
        dpb.laplace_inverse_cdf(0.0, 1.0)


def test_zero_noise_source():
    src = dpb.NoiseSource(5, 0, zero_noise=True)
    assert all(src.laplace(2.0) == 0.0 for _ in range(10))
    assert src.substream(3).zero_noise


def test_mean_profiles():
    assert dpb.means_c1(5) == [0.75, 0.7, 0.7, 0.7, 0.7]
    assert dpb.means_c2(5) == [0.75, 0.625, 0.5, 0.375, 0.25]
    assert dpb.means_c3(5) == pytest.approx([0.75, 0.53125, 0.375, 0.28125, 0.25])
    assert dpb.means_c4(5) == pytest.approx([0.75, 0.71875, 0.625, 0.46875, 0.25])
    assert dpb.means_for_setting("c2", 3) == [0.75, 0.5, 0.25]


def test_stopping_rules():
    cfg = dpb.StoppingRuleConfig(alpha=1.0, beta=0.1, max_samples=1000)
    out = dpb.nas_run(dpb.constant_stream(1.0), cfg)
    assert not out.capped
    assert out.halt_time == 20
    assert out.estimate == 1.0

    cfg = dpb.StoppingRuleConfig(alpha=0.25, beta=0.05, epsilon=1.0, max_samples=1 << 20)
    stream = dpb.bernoulli_pm1_stream(0.7, dpb.NoiseSource(3, 100))
    out = dpb.dp_exp_nas_run(stream, cfg, dpb.NoiseSource(3, 101))
    assert not out.capped
    assert out.halt_time & (out.halt_time - 1) == 0  # power of two
    assert abs(out.estimate - 0.4) < 0.1

    assert dpb.expected_halt_bound(cfg, 0.4) == 845017


def test_stopping_rule_accepts_python_callables():
    values = iter([1.0] * 100)
    cfg = dpb.StoppingRuleConfig(alpha=1.0, beta=0.1, max_samples=50)
    out = dpb.nas_run(lambda: next(values), cfg)
    assert out.halt_time == 20


def test_tree_counter():
    counter = dpb.TreeCounter(16, 1.0, dpb.NoiseSource(1, 0, zero_noise=True))
    for _ in range(10):
        counter.add(0.5)
    assert counter.sum() == 5.0
    assert counter.depth == 4
    noisy = dpb.TreeCounter(16, 1.0, dpb.NoiseSource(1, 0))
    noisy.add(1.0)
    assert noisy.sum() == noisy.sum()  # node noise is reused, not redrawn


def test_bandit_runs():
    env = dpb.BanditEnvironment(dpb.means_c2(5))
    trace = dpb.dp_se_run(env, 1e-4, 0.5, 20000, dpb.NoiseSource(1, 0),
                          dpb.evenly_spaced_checkpoints(20000, 10))
    assert trace.total_pulls == 20000
    regrets = [cp.cum_regret for cp in trace.checkpoints]
    assert regrets == sorted(regrets)
    assert trace.final_regret == pytest.approx(
        sum(p * env.gap(a) for a, p in enumerate(trace.pulls)), rel=1e-9
    )

    det = dpb.BanditEnvironment(dpb.means_c2(3), deterministic=True)
    frozen = dpb.dp_se_run(det, 0.01, 1.0, 30000, dpb.NoiseSource(7, 0, zero_noise=True))
    assert frozen.final_regret == 748.5
    assert [e.arm for e in frozen.eliminations] == [1, 2]


def test_grid_runner(tmp_path):
    cfg = dpb.ExperimentConfig()
    cfg.settings = ["c2"]
    cfg.algorithms = ["dp_se", "se"]
    cfg.arm_counts = [3]
    cfg.epsilons = [0.5]
    cfg.horizon = 5000
    cfg.runs = 2
    cfg.checkpoint_count = 4
    cfg.output_dir = str(tmp_path / "out")
    result = dpb.run_grid(cfg)
    assert len(result.cells) == 2
    assert len(result.trace_files) == 4
    assert (tmp_path / "out" / "summary.json").exists()
