import numpy as np
import pytest

from qcawalk import (
    LEAKAGE,
    AngleSchedule,
    InitSpec,
    Lattice,
    ResourceLimitError,
    WalkBackend,
    WalkConfig,
    build_step_operator,
    qw_init,
    run_walk,
    search_initializer,
    search_initializer_gates,
    sector_oracle,
    sector_project,
    success_probability,
)


class TestQwInit:
    def test_symmetric_fig_state(self):
        state = qw_init(Lattice("cycle", 8), 3, symmetric=True)
        sec = sector_project(state, 8)
        probs = sec.probabilities()
        assert probs[3] == pytest.approx(0.5, abs=1e-12)
        assert probs[4] == pytest.approx(0.5, abs=1e-12)
        assert probs[[0, 1, 2, 5, 6, 7]].max() < 1e-15
        assert sec.leakage_norm < 1e-12
        # equal phase up to a global factor: amplitudes are proportional
        assert abs(sec.amplitudes[3] - sec.amplitudes[4]) < 1e-12

    def test_single_site(self):
        state = qw_init(Lattice("cycle", 8), 3, symmetric=False)
        sec = sector_project(state, 8)
        assert sec.probabilities()[3] == pytest.approx(1.0, abs=1e-12)
        assert sec.leakage_norm < 1e-12

    def test_symmetric_wraps(self):
        state = qw_init(Lattice("cycle", 4), 3, symmetric=True)
        probs = sector_project(state, 4).probabilities()
        assert probs[3] == pytest.approx(0.5, abs=1e-12)
        assert probs[0] == pytest.approx(0.5, abs=1e-12)

    def test_invalid_site(self):
        with pytest.raises(ValueError):
            qw_init(Lattice("cycle", 4), 4)


class TestSearchInitializer:
    def test_exact_four(self):
        state = search_initializer(Lattice("cycle", 4), "exact")
        sec = sector_project(state, 4)
        assert np.abs(sec.amplitudes - 0.5).max() < 1e-12
        assert sec.leakage_norm < 1e-12

    @pytest.mark.parametrize("N", [4, 8, 16])
    def test_literal_uniform(self, N):
        state = search_initializer(Lattice("cycle", N), "literal")
        sec = sector_project(state, N)
        assert np.abs(sec.probabilities() - 1.0 / N).max() < 1e-10
        assert sec.leakage_norm < 1e-12

    def test_literal_gate_count(self):
        gates = search_initializer_gates(8)
        assert sum(1 for g in gates if g.name == "XY") == 7  # N - 1 splits

    def test_literal_needs_power_of_two(self):
        with pytest.raises(ValueError):
            search_initializer(Lattice("cycle", 6), "literal")
        with pytest.raises(ValueError):
            search_initializer_gates(6)

    def test_torus_literal(self):
        state = search_initializer(Lattice("torus", 4), "literal")
        sec = sector_project(state, 16)
        assert np.abs(sec.probabilities() - 1.0 / 16).max() < 1e-10


class TestSectorOracle:
    def test_unitarity_16_cycle(self):
        m = sector_oracle(Lattice("cycle", 16), AngleSchedule(), "walk")
        assert np.abs(m.conj().T @ m - np.eye(16)).max() < 1e-12

    def test_zero_angle_is_identity(self):
        m = sector_oracle(Lattice("cycle", 8), AngleSchedule(default=0.0), "walk")
        assert np.abs(m - np.eye(8)).max() < 1e-12

    def test_matches_statevector_walk(self):
        lat = Lattice("cycle", 4)
        sched = AngleSchedule()
        m = sector_oracle(lat, sched, "walk")
        op = build_step_operator(lat, sched, "walk")
        state = qw_init(lat, 0)
        vec = sector_project(state, 4).amplitudes
        for _ in range(10):
            op.apply(state)
            vec = m @ vec
            sec = sector_project(state, 4)
            assert np.abs(sec.amplitudes - vec).max() < 1e-10
            assert sec.leakage_norm < 1e-12

    def test_matches_statevector_search(self):
        lat = Lattice("cycle", 6)
        sched = AngleSchedule(marked=2)
        m = sector_oracle(lat, sched, "search")
        op = build_step_operator(lat, sched, "search")
        state = search_initializer(lat, "exact")
        vec = sector_project(state, 6).amplitudes
        for _ in range(12):
            op.apply(state)
            vec = m @ vec
            sec = sector_project(state, 6)
            assert np.abs(sec.amplitudes - vec).max() < 1e-10
            assert sec.leakage_norm < 1e-12


class TestRunWalk:
    def test_step_zero_is_init(self):
        lat = Lattice("cycle", 8)
        cfg = WalkConfig(lat, steps=0, init=InitSpec("symmetric", 3), seed=1)
        res = run_walk(cfg)
        assert len(res.per_step) == 1
        dist = res.exact[0]
        assert dist.get(3) == pytest.approx(0.5, abs=1e-12)
        assert dist.get(4) == pytest.approx(0.5, abs=1e-12)

    def test_per_step_length(self):
        cfg = WalkConfig(Lattice("cycle", 4), steps=5, seed=1)
        res = run_walk(cfg)
        assert len(res.per_step) == 6
        assert len(res.leakage_per_step) == 6

    def test_one_step_matches_oracle(self):
        lat = Lattice("cycle", 4)
        cfg = WalkConfig(lat, steps=1, init=InitSpec("single", 0), seed=2)
        res = run_walk(cfg)
        m = sector_oracle(lat, AngleSchedule(), "walk")
        init = sector_project(qw_init(lat, 0), 4).amplitudes
        want = np.abs(m @ init) ** 2
        got = np.array([res.exact[1].get(v) for v in range(4)])
        assert np.abs(got - want).max() < 1e-10

    def test_torus_search_peak(self):
        lat = Lattice("torus", 4)
        cfg = WalkConfig(lat, steps=4, init=InitSpec("search_uniform"),
                         marked=lat.vertex_id(3, 0), seed=3)
        res = run_walk(cfg)
        peak, step = success_probability(res.exact, 3)
        assert step == 2
        assert peak == pytest.approx(0.2762, abs=2e-3)

    @pytest.mark.parametrize("kind,N,marked", [("cycle", 4, 2), ("cycle", 8, 2),
                                               ("cycle", 16, 2), ("torus", 4, 3)])
    def test_search_amplifies_marked_vertex(self, kind, N, marked):
        lat = Lattice(kind, N)
        cfg = WalkConfig(lat, steps=20, init=InitSpec("search_uniform"),
                         marked=marked, seed=1)
        res = run_walk(cfg)
        peak, _ = success_probability(res.exact, marked)
        assert peak > res.exact[0].get(marked)  # above the uniform start

    def test_search_leakage_stays_zero(self):
        lat = Lattice("cycle", 8)
        cfg = WalkConfig(lat, steps=20, init=InitSpec("search_uniform"),
                         marked=2, seed=4)
        res = run_walk(cfg)
        assert max(res.leakage_per_step) < 1e-12

    def test_reflection_symmetry(self):
        # symmetric init on bond (k, k+1): the distribution stays invariant
        # under the reflection about that bond's centre at every step
        for N, k in [(8, 3), (10, 2)]:
            lat = Lattice("cycle", N)
            cfg = WalkConfig(lat, steps=20, init=InitSpec("symmetric", k), seed=5)
            res = run_walk(cfg)
            for dist in res.exact:
                for v in range(N):
                    mirror = (2 * k + 1 - v) % N
                    assert dist.get(v) == pytest.approx(dist.get(mirror), abs=1e-12)

    def test_translation_invariance_even_rotation(self):
        # rotating all labels by an even offset maps the tessellations onto
        # themselves, so the output distribution rotates identically
        lat = Lattice("cycle", 8)
        base = run_walk(WalkConfig(lat, steps=7, init=InitSpec("symmetric", 1), seed=6))
        shifted = run_walk(WalkConfig(lat, steps=7, init=InitSpec("symmetric", 3), seed=6))
        for d0, d2 in zip(base.exact, shifted.exact):
            for v in range(8):
                assert d2.get((v + 2) % 8) == pytest.approx(d0.get(v), abs=1e-12)

    def test_density_cap_resource_error(self):
        lat = Lattice("torus", 4)  # 16 qubits > default cap of 12
        cfg = WalkConfig(lat, steps=1, init=InitSpec("search_uniform"), marked=3,
                         backend=WalkBackend("density"))
        with pytest.raises(ResourceLimitError, match="trajectories"):
            run_walk(cfg)

    def test_density_noise_off_matches_statevector(self):
        lat = Lattice("cycle", 4)
        sv = run_walk(WalkConfig(lat, steps=6, init=InitSpec("single", 1), seed=7))
        dm = run_walk(WalkConfig(lat, steps=6, init=InitSpec("single", 1), seed=7,
                                 backend=WalkBackend("density")))
        for a, b in zip(sv.exact, dm.exact):
            for v in range(4):
                assert a.get(v) == pytest.approx(b.get(v), abs=1e-10)

    def test_empirical_seeded_per_step(self):
        cfg = WalkConfig(Lattice("cycle", 4), steps=3, seed=9, shots=500)
        a = run_walk(cfg)
        b = run_walk(cfg)
        for (_, ea), (_, eb) in zip(a.per_step, b.per_step):
            assert ea.counts == eb.counts

    def test_full_distribution_recording(self):
        cfg = WalkConfig(Lattice("cycle", 4), steps=2, init=InitSpec("single", 0),
                         seed=1, full_distributions=True)
        res = run_walk(cfg)
        assert res.full_per_step is not None
        for full, compact in zip(res.full_per_step, res.exact):
            # one-hot labels carry the same mass as the vertex labels
            for v in range(4):
                assert full.outcomes.get(1 << v, 0.0) == pytest.approx(
                    compact.get(v), abs=1e-12)

    def test_full_distributions_unsupported_on_trajectories(self):
        cfg = WalkConfig(Lattice("cycle", 4), steps=1,
                         backend=WalkBackend("trajectories", 10),
                         full_distributions=True)
        with pytest.raises(ValueError):
            run_walk(cfg)

    def test_marked_validation(self):
        with pytest.raises(ValueError):
            WalkConfig(Lattice("cycle", 4), steps=1, marked=7)
