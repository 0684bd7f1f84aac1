"""VQE/dVQE driver tests: objective construction in both eval modes, run
orchestration, metric math, and config digests."""

import numpy as np
import pytest

from hevqe import (
    AnsatzSpec,
    ChainSpec,
    EvalMode,
    ImpuritySpec,
    PauliSum,
    RunConfig,
    apply_circuit,
    approximation_ratio,
    build_ansatz,
    config_digest,
    cut_value,
    energy_objective,
    exact_ground,
    he_maxcut_ansatz,
    heisenberg_hamiltonian,
    index_to_bitstring,
    maxcut_hamiltonian,
    new_basis_state,
    prob_best_cut,
    qaoa_ansatz,
    random_complete_graph,
    run_dvqe,
    run_vqe,
)


class TestEvalMode:
    def test_defaults(self):
        mode = EvalMode()
        assert mode.kind == "exact"

    def test_validation(self):
        with pytest.raises(ValueError):
            EvalMode(kind="approximate")
        with pytest.raises(ValueError):
            EvalMode(kind="shots", shots=0)
        with pytest.raises(ValueError):
            EvalMode(kind="shots", shots=100, seed=-1)


class TestEnergyObjective:
    def test_he_maxcut_basis_energies(self, triangle):
        circ = he_maxcut_ansatz(3)
        obj = energy_objective(circ, maxcut_hamiltonian(triangle))
        for idx in range(8):
            z = index_to_bitstring(idx, 3)
            params = np.pi * np.array([float(c) for c in z])
            assert obj(params) == pytest.approx(-cut_value(triangle, z), abs=1e-9)

    def test_offset_only_constant(self):
        circ = he_maxcut_ansatz(2)
        obj = energy_objective(circ, PauliSum(2, constant_offset=1.25))
        rng = np.random.default_rng(0)
        for _ in range(4):
            assert obj(rng.uniform(0, np.pi, 2)) == pytest.approx(1.25, abs=1e-12)

    def test_general_observable_path(self):
        # non-diagonal H exercises the statevector expectation branch
        circ = qaoa_ansatz(random_complete_graph(3, 2), 1)
        H = heisenberg_hamiltonian(3, 1.0, 0.5)
        obj = energy_objective(circ, H)
        params = np.array([0.3, -0.8])
        state = apply_circuit(circ, params)
        dense = H.to_dense()
        expected = np.vdot(state.amplitudes, dense @ state.amplitudes).real
        assert obj(params) == pytest.approx(expected, abs=1e-10)

    def test_observable_too_large(self):
        circ = he_maxcut_ansatz(2)  # 4 qubits
        with pytest.raises(ValueError):
            energy_objective(circ, PauliSum(5, [(1.0, {4: "Z"})]))

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_shots_within_five_se(self, seed):
        rng = np.random.default_rng(seed)
        n = 5
        g = random_complete_graph(n, 60 + seed)
        circ = qaoa_ansatz(g, 1)
        H = heisenberg_hamiltonian(n, 1.0, 1.0)
        params = rng.uniform(-np.pi, np.pi, circ.n_params)
        exact = energy_objective(circ, H)(params)
        obj = energy_objective(circ, H, EvalMode(kind="shots", shots=20000, seed=seed))
        est = obj(params)
        se = obj.noise_std
        assert se > 0
        assert abs(est - exact) <= 5 * se

    def test_shots_deterministic(self, triangle):
        circ = qaoa_ansatz(triangle, 1)
        H = maxcut_hamiltonian(triangle)
        params = np.array([0.4, 0.9])
        a = energy_objective(circ, H, EvalMode("shots", 500, 7))(params)
        b = energy_objective(circ, H, EvalMode("shots", 500, 7))(params)
        assert a == b


class TestRunVqe:
    def _config(self, n=5, seed=7, budget=150, kind="HE_MAXCUT", rp=1, iseed=0):
        g = random_complete_graph(n, iseed)
        spec = AnsatzSpec(
            kind=kind, n_problem=n, reps_or_p=rp,
            graph=g if kind == "QAOA" else None,
        )
        return RunConfig(ansatz=spec, graph=g, budget=budget, seed=seed)

    def test_he_close_to_oracle(self):
        cfg = self._config()
        rec = run_vqe(cfg)
        from hevqe import brute_force_maxcut

        c_opt, _ = brute_force_maxcut(cfg.graph)
        assert rec.best_energy <= -0.98 * c_opt
        assert rec.c_opt == pytest.approx(c_opt, abs=1e-12)
        assert rec.alpha == pytest.approx(-rec.best_energy / c_opt, abs=1e-12)

    def test_minimum_budget_record(self):
        cfg = self._config(n=3, budget=13, iseed=4)
        rec = run_vqe(cfg)
        assert len(rec.trace) <= 13
        assert rec.best_energy == pytest.approx(min(rec.trace.values), abs=0)
        assert len(rec.alpha_series) == len(rec.trace)
        assert len(rec.p_best_series) == len(rec.trace)

    def test_determinism(self):
        r1 = run_vqe(self._config(n=4, budget=40, iseed=2))
        r2 = run_vqe(self._config(n=4, budget=40, iseed=2))
        assert r1.best_energy == r2.best_energy
        assert np.array_equal(r1.best_params, r2.best_params)
        assert np.array_equal(r1.trace.values, r2.trace.values)
        assert r1.alpha == r2.alpha and r1.p_best == r2.p_best

    def test_alpha_series_non_decreasing(self):
        rec = run_vqe(self._config(n=4, budget=60, iseed=3))
        series = np.array(rec.alpha_series)
        assert np.all(np.diff(series) >= -1e-12)
        assert series[-1] == pytest.approx(rec.alpha, abs=1e-12)
        assert rec.alpha <= 1 + 1e-9

    def test_qaoa_graph_mismatch_rejected(self):
        g1 = random_complete_graph(4, 0)
        g2 = random_complete_graph(4, 1)
        spec = AnsatzSpec(kind="QAOA", n_problem=4, reps_or_p=1, graph=g1)
        with pytest.raises(ValueError):
            run_vqe(RunConfig(ansatz=spec, graph=g2, budget=40, seed=0))

    def test_graph_required(self):
        spec = AnsatzSpec(kind="HE_MAXCUT", n_problem=4)
        with pytest.raises(ValueError):
            run_vqe(RunConfig(ansatz=spec, budget=40, seed=0))


class TestMetrics:
    def test_alpha_one_at_optimum(self, triangle):
        cfg = RunConfig(
            ansatz=AnsatzSpec(kind="HE_MAXCUT", n_problem=3),
            graph=triangle, budget=60, seed=1,
        )
        rec = run_vqe(cfg)
        assert approximation_ratio(rec, triangle) == rec.alpha

    def test_uniform_superposition_alpha(self, triangle):
        # mean cut of a random assignment is half the total weight
        state = apply_circuit(qaoa_ansatz(triangle, 1), np.zeros(2))
        H = maxcut_hamiltonian(triangle)
        from hevqe import expectation

        energy = expectation(state, H)
        total = sum(w for _, w in triangle.edges())
        assert -energy / 1.4 == pytest.approx((total / 2) / 1.4, abs=1e-12)

    def test_prob_best_cut_basis(self, triangle):
        state = new_basis_state(3, ones=(2,))  # "001" isolates node 2
        assert prob_best_cut(state, triangle) == pytest.approx(1.0, abs=1e-12)

    def test_prob_best_cut_uniform(self):
        g = random_complete_graph(4, 11)
        from hevqe import brute_force_maxcut

        _, best = brute_force_maxcut(g)
        state = apply_circuit(qaoa_ansatz(g, 1), np.zeros(2))
        expect = len(best) / 16
        assert prob_best_cut(state, g) == pytest.approx(expect, abs=1e-12)

    def test_prob_best_cut_marginalizes_bath(self, triangle):
        # HE register: 6 qubits; basis state with problem "001" and bath 110
        state = new_basis_state(6, ones=(2, 3, 4))
        assert prob_best_cut(state, triangle) == pytest.approx(1.0, abs=1e-12)


class TestRunDvqe:
    def _config(self, n, d, frozen, h, reps=1, budget=200, seed=3):
        imp = ImpuritySpec(site=d, frozen_state=frozen)
        spec = AnsatzSpec(kind="HE_DVQE", n_problem=n, reps_or_p=reps, impurity=imp)
        return RunConfig(
            ansatz=spec, chain=ChainSpec(n, 1.0, float(h)), budget=budget, seed=seed
        )

    def test_two_site_reaches_oracle(self):
        res = run_dvqe(self._config(2, 1, "zero", 0))
        assert res.e_ref == pytest.approx(-1.0, abs=1e-12)
        assert abs(res.system_energy - res.e_ref) < 1e-3
        assert res.error_abs == pytest.approx(
            abs(res.system_energy - res.e_ref), abs=1e-15
        )
        assert res.error_rel == pytest.approx(res.error_abs / 1.0, abs=1e-15)

    def test_variational_bound(self):
        res = run_dvqe(self._config(3, 0, "one", 1.0, reps=2, budget=120))
        e0, _ = exact_ground(heisenberg_hamiltonian(3, 1.0, 1.0))
        assert res.system_energy >= e0 - 1e-9

    def test_magnetization_range(self):
        res = run_dvqe(self._config(2, 0, "one", 2.0, budget=80))
        assert -1.0 - 1e-9 <= res.magnetization <= 1.0 + 1e-9

    def test_determinism(self):
        r1 = run_dvqe(self._config(2, 1, "zero", 0))
        r2 = run_dvqe(self._config(2, 1, "zero", 0))
        assert r1.system_energy == r2.system_energy
        assert r1.magnetization == r2.magnetization

    def test_chain_required(self):
        spec = AnsatzSpec(
            kind="HE_DVQE", n_problem=3, reps_or_p=1,
            impurity=ImpuritySpec(0, "zero"),
        )
        with pytest.raises(ValueError):
            run_dvqe(RunConfig(ansatz=spec, budget=60, seed=0))

    def test_record_well_formed(self):
        res = run_dvqe(self._config(2, 1, "one", 1.0, budget=60))
        rec = res.record
        assert rec.best_energy == pytest.approx(res.system_energy, abs=0)
        assert len(rec.trace) <= 60


class TestConfigDigest:
    def test_stable_and_sensitive(self, triangle):
        spec = AnsatzSpec(kind="HE_MAXCUT", n_problem=3)
        a = RunConfig(ansatz=spec, graph=triangle, budget=100, seed=0)
        b = RunConfig(ansatz=spec, graph=triangle, budget=100, seed=0)
        assert config_digest(a) == config_digest(b)
        c = RunConfig(ansatz=spec, graph=triangle, budget=101, seed=0)
        assert config_digest(c) != config_digest(a)
        d = RunConfig(ansatz=spec, graph=triangle, budget=100, seed=1)
        assert config_digest(d) != config_digest(a)

    def test_digest_format(self, triangle):
        spec = AnsatzSpec(kind="HE_MAXCUT", n_problem=3)
        digest = config_digest(RunConfig(ansatz=spec, graph=triangle, budget=10, seed=0))
        assert len(digest) == 12
        int(digest, 16)  # hex
