import numpy as np
import pytest

from qaoa_lab.graphs import Graph, assign_random_weights, brute_force_maxcut, \
    generate_random_regular
from qaoa_lab.optimizer import FourierParams, fourier_to_direct, local_optimize, \
    _Objective
from qaoa_lab.shot_noise import (
    EDUCATED_UV_P1,
    EDUCATED_UV_P5,
    MeasurementLedger,
    NoiseConfig,
    NoisyEstimate,
    estimate_objective,
    load_ledger_csv,
    noisy_local_optimize,
    qa_baseline_ledger,
    run_noisy_experiment,
)
from qaoa_lab.statevector import (
    QaoaParams,
    StateVector,
    build_diagonal_cost,
    expectation_and_variance,
    init_plus_state,
    qaoa_state,
)


def random_weighted(n, d, seed):
    return assign_random_weights(generate_random_regular(n, d, seed), seed + 1)


class TestNoiseConfig:
    def test_positivity_required(self):
        with pytest.raises(ValueError, match="positive"):
            NoiseConfig(epsilon=0.0)
        with pytest.raises(ValueError, match="positive"):
            NoiseConfig(xi=-1.0)


class TestEstimateObjective:
    def test_deterministic_state_stops_at_minimum(self):
        cost = build_diagonal_cost(random_weighted(8, 3, 0))
        amp = np.zeros(2 ** 8, dtype=complex)
        amp[37] = 1.0
        ledger = MeasurementLedger()
        est = estimate_objective(StateVector(amp, 8), cost, 0.05,
                                 np.random.default_rng(0), ledger)
        assert est.m == 10 and est.sem == 0.0
        assert est.f_bar == cost.values[37]
        assert len(ledger) == 10

    def test_unbiased_and_sem_bounded(self):
        g = random_weighted(10, 3, 1)
        cost = build_diagonal_cost(g)
        state = init_plus_state(10)
        f_true, _ = expectation_and_variance(state, cost)
        rng = np.random.default_rng(2)
        ledger = MeasurementLedger()
        xi = 0.05
        estimates = [estimate_objective(state, cost, xi, rng, ledger)
                     for _ in range(1000)]
        mean = np.mean([e.f_bar for e in estimates])
        assert abs(mean - f_true) < 3 * xi / np.sqrt(1000)
        assert all(e.sem <= xi for e in estimates)
        hits = np.mean([abs(e.f_bar - f_true) <= 3 * xi for e in estimates])
        assert hits >= 0.99

    def test_sample_count_tracks_variance(self):
        g = random_weighted(10, 3, 3)
        cost = build_diagonal_cost(g)
        state = init_plus_state(10)
        _, var = expectation_and_variance(state, cost)
        rng = np.random.default_rng(4)
        ledger = MeasurementLedger()
        xi = 0.05
        ms = [estimate_objective(state, cost, xi, rng, ledger).m
              for _ in range(200)]
        expect = var / xi ** 2
        assert 0.5 * expect <= np.mean(ms) <= 2.0 * expect

    def test_halving_xi_quadruples_samples(self):
        g = random_weighted(10, 3, 5)
        cost = build_diagonal_cost(g)
        state = qaoa_state(cost, QaoaParams([0.4], [0.2]))
        rng = np.random.default_rng(6)
        ledger = MeasurementLedger()
        m1 = np.mean([estimate_objective(state, cost, 0.08, rng, ledger).m
                      for _ in range(200)])
        m2 = np.mean([estimate_objective(state, cost, 0.04, rng, ledger).m
                      for _ in range(200)])
        assert 3.0 <= m2 / m1 <= 5.0


class TestLedger:
    def test_best_curve_monotone(self):
        ledger = MeasurementLedger()
        for cut in [1.0, 0.5, 2.0, 1.5, 2.0, 3.0]:
            ledger.record(cut)
        assert ledger.best == [1.0, 1.0, 2.0, 2.0, 2.0, 3.0]
        assert np.all(np.diff(ledger.best_curve()) >= 0)

    def test_csv_round_trip(self, tmp_path):
        ledger = MeasurementLedger()
        for cut in [1.25, 0.5, 9.75]:
            ledger.record(cut)
        ledger.save_csv(tmp_path / "led.csv")
        back = load_ledger_csv(tmp_path / "led.csv")
        assert back.cuts == ledger.cuts
        assert back.best == ledger.best
        header = (tmp_path / "led.csv").read_text().splitlines()[0]
        assert header == "i,cut,best_cut"


class TestNoisyOptimize:
    def test_measurement_bookkeeping(self):
        g = random_weighted(8, 3, 7)
        ledger = MeasurementLedger()
        result = noisy_local_optimize(g, QaoaParams([0.8], [0.3]),
                                      NoiseConfig(seed=1), ledger)
        assert result.n_evals == len(ledger)
        assert result.f_bar is not None

    def test_stays_near_noiseless_optimum_from_same_start(self):
        g = random_weighted(10, 3, 9)
        start = fourier_to_direct(FourierParams(*EDUCATED_UV_P1, 1))
        obj = _Objective(g)
        noiseless = local_optimize(obj.value, start.as_vector(), fused=obj.fused)
        cfg = NoiseConfig(seed=3)
        result = noisy_local_optimize(g, start, cfg, MeasurementLedger())
        assert abs(result.f_bar - noiseless.f) <= cfg.epsilon + 3 * cfg.xi

    def test_reproducible(self):
        g = random_weighted(8, 3, 11)
        a = MeasurementLedger()
        b = MeasurementLedger()
        ra = noisy_local_optimize(g, QaoaParams([0.5], [0.2]), NoiseConfig(seed=5), a)
        rb = noisy_local_optimize(g, QaoaParams([0.5], [0.2]), NoiseConfig(seed=5), b)
        assert a.cuts == b.cuts
        assert ra.f_bar == rb.f_bar


class TestNoisyExperiment:
    def test_educated_p1_values(self):
        assert EDUCATED_UV_P1[0].tolist() == [1.4849]
        assert EDUCATED_UV_P1[1].tolist() == [0.5409]
        assert EDUCATED_UV_P5[0].tolist() == [1.9212, 0.2891, 0.1601, 0.0564, 0.0292]
        assert EDUCATED_UV_P5[1].tolist() == [0.6055, -0.0178, 0.0431, -0.0061, 0.0141]

    def test_ledger_monotone_and_levels_advance(self):
        g = random_weighted(10, 3, 13)
        ledger, results = run_noisy_experiment(g, 1, "educated",
                                               NoiseConfig(seed=1), p_max=3)
        assert np.all(np.diff(ledger.best_curve()) >= 0)
        assert [lr.p for lr in results] == [1, 2, 3]
        assert sum(lr.n_evals for lr in results) == len(ledger)

    def test_start_level_five(self):
        g = random_weighted(10, 3, 15)
        ledger, results = run_noisy_experiment(g, 5, "educated",
                                               NoiseConfig(seed=2), p_max=5)
        assert results[0].p == 5
        assert results[0].params.p == 5

    def test_educated_beats_random_on_median_measurements(self):
        # measurements until the optimal cut first appears, over seeds
        g = random_weighted(12, 3, 40)
        c_max = brute_force_maxcut(g).c_max

        def first_hit(ledger):
            hits = np.nonzero(ledger.best_curve() >= c_max - 1e-9)[0]
            return hits[0] + 1 if hits.size else len(ledger) + 1

        educated, random_ = [], []
        for seed in range(12):
            led_e, _ = run_noisy_experiment(g, 1, "educated",
                                            NoiseConfig(seed=seed), p_max=3)
            led_r, _ = run_noisy_experiment(g, 1, "random",
                                            NoiseConfig(seed=seed), p_max=3)
            educated.append(first_hit(led_e))
            random_.append(first_hit(led_r))
        assert np.median(educated) < np.median(random_)


class TestQaBaseline:
    def test_ledger_lengths_and_determinism(self):
        g = random_weighted(8, 3, 17)
        ledgers = qa_baseline_ledger(g, [5.0, 20.0], shots=500, seed=3)
        assert set(ledgers) == {5.0, 20.0}
        assert all(len(led) == 500 for led in ledgers.values())
        again = qa_baseline_ledger(g, [5.0, 20.0], shots=500, seed=3)
        assert ledgers[5.0].cuts == again[5.0].cuts

    def test_certain_state_hits_immediately(self):
        # at very long annealing times the ground state dominates and the
        # first measurement is already optimal
        g = generate_random_regular(6, 3, 0)
        c_max = brute_force_maxcut(g).c_max
        ledgers = qa_baseline_ledger(g, [400.0], shots=5, seed=1)
        assert ledgers[400.0].cuts[0] == pytest.approx(c_max)

    def test_geometric_hitting_time(self):
        g = random_weighted(8, 3, 19)
        from qaoa_lab.annealer import evolve, linear_ramp
        from qaoa_lab.statevector import PARITY_POSITIVE, ground_state_population

        T = 15.0
        state = evolve(g, linear_ramp(T), basis=PARITY_POSITIVE)
        cut = brute_force_maxcut(g)
        p_gs = ground_state_population(state, cut)
        assert 0.02 < p_gs < 0.9
        ledgers = qa_baseline_ledger(g, [T], shots=20000, seed=7)
        hits = np.nonzero(np.array(ledgers[T].cuts) >= cut.c_max - 1e-9)[0]
        gaps = np.diff(np.concatenate([[-1], hits]))
        mean_wait = float(np.mean(gaps))
        assert mean_wait == pytest.approx(1.0 / p_gs, rel=0.15)
