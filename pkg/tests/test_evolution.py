"""Generator assembly, RK4 integration and the spectral propagator."""

import numpy as np
import pytest
import scipy.linalg

from decowalk.evolution import (
    DiagonalPropagator,
    TimeGrid,
    build_full_operator,
    effective_step,
    exact_evolve,
    integrate,
    rk4_step_matrix,
)
from decowalk.model import WalkConfig, initial_state, rho_rhs, s_rhs


def random_symmetric(rng, n):
    raw = rng.normal(size=(n, n))
    return 0.5 * (raw + raw.T)


class TestTimeGrid:
    def test_rejects_reversed_window(self):
        with pytest.raises(ValueError):
            TimeGrid(t_end=1.0, t_start=2.0)

    def test_rejects_oversized_dt(self):
        with pytest.raises(ValueError):
            TimeGrid(t_end=1.0, dt=2.0)

    def test_rejects_bad_stride(self):
        with pytest.raises(ValueError):
            TimeGrid(t_end=1.0, sample_stride=0)


class TestBuildFullOperator:
    def test_matches_stencil_s(self):
        rng = np.random.default_rng(7)
        config = WalkConfig(n=6, gamma=1.3)
        op = build_full_operator(config).matrix
        s = random_symmetric(rng, 6)
        np.testing.assert_allclose(
            (op @ s.ravel()).reshape(6, 6), s_rhs(config, s), atol=1e-14
        )

    def test_matches_stencil_rho(self):
        rng = np.random.default_rng(8)
        config = WalkConfig(n=5, gamma=0.4)
        op = build_full_operator(config, "rho").matrix
        rho = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        rho = 0.5 * (rho + rho.conj().T)
        np.testing.assert_allclose(
            (op @ rho.ravel()).reshape(5, 5), rho_rhs(config, rho), atol=1e-14
        )

    def test_undamped_rows_have_four_quarter_entries(self):
        op = build_full_operator(WalkConfig(n=3, gamma=0.0)).matrix
        for row in op:
            nonzero = row[row != 0.0]
            assert nonzero.size == 4
            assert np.all(np.abs(nonzero) == 0.25)

    def test_damping_sits_on_off_diagonal_rows(self):
        op = build_full_operator(WalkConfig(n=3, gamma=2.0)).matrix
        for mu in range(3):
            for nu in range(3):
                row = mu * 3 + nu
                assert op[row, row] == (0.0 if mu == nu else -2.0)

    def test_annihilates_uniform_diagonal(self):
        op = build_full_operator(WalkConfig(n=7, gamma=0.9)).matrix
        uniform = (np.eye(7) / 7).ravel()
        assert np.abs(op @ uniform).max() < 1e-16

    def test_diagonal_coordinate_column_sums_vanish(self):
        # No generator column feeds net weight into the diagonal sum.
        op = build_full_operator(WalkConfig(n=5, gamma=1.1)).matrix
        diag_rows = np.arange(5) * 5 + np.arange(5)
        np.testing.assert_allclose(op[diag_rows, :].sum(axis=0), 0.0, atol=1e-15)

    def test_rejects_unknown_model(self):
        with pytest.raises(ValueError):
            build_full_operator(WalkConfig(n=4), "heisenberg")


class TestExactEvolve:
    def test_time_zero_is_identity(self):
        config = WalkConfig(n=5, gamma=1.0)
        np.testing.assert_array_equal(exact_evolve(config, 0.0), initial_state(config))

    def test_trace_preserved(self):
        state = exact_evolve(WalkConfig(n=4, gamma=0.5), 10.0)
        assert abs(np.trace(state) - 1.0) < 1e-12

    def test_relaxes_to_uniform_diagonal(self):
        state = exact_evolve(WalkConfig(n=5, gamma=1.0), 200.0)
        assert np.abs(state - np.eye(5) / 5).max() < 1e-6

    def test_size_guard(self):
        with pytest.raises(ValueError):
            exact_evolve(WalkConfig(n=65, gamma=1.0), 1.0)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            exact_evolve(WalkConfig(n=4), -1.0)


class TestRk4StepMatrix:
    def test_equals_quartic_taylor(self):
        rng = np.random.default_rng(9)
        g = rng.normal(size=(6, 6))
        h = 0.07
        a = h * g
        expected = (
            np.eye(6) + a + a @ a / 2 + a @ a @ a / 6 + a @ a @ a @ a / 24
        )
        np.testing.assert_allclose(rk4_step_matrix(g, h), expected, atol=1e-14)

    def test_effective_step_respects_cap(self):
        dt, steps = effective_step(10.0, 0.01, gamma=50.0)
        assert dt <= 0.1 / 50.0 + 1e-15
        assert abs(steps * dt - 10.0) < 1e-9


class TestIntegrate:
    def test_matches_exponential_oracle(self):
        config = WalkConfig(n=4, gamma=0.5)
        series = integrate(config, TimeGrid(t_end=50.0, dt=1e-3, sample_stride=1000))
        op = build_full_operator(config).matrix
        hop = scipy.linalg.expm(op * (series.times[1] - series.times[0]))
        vec = initial_state(config).ravel()
        worst = 0.0
        for k in range(series.times.size):
            worst = max(worst, np.abs(series.dists[k] - vec[np.arange(4) * 5]).max())
            vec = hop @ vec
        assert worst <= 1e-8

    def test_closed_walk_return_probability(self):
        # Quarter-rate hopping: the undamped return probability on the
        # 4-cycle is cos^4 of a quarter of the elapsed time.
        config = WalkConfig(n=4, gamma=0.0)
        series = integrate(config, TimeGrid(t_end=50.0, dt=1e-3, sample_stride=500))
        expected = np.cos(series.times / 4.0) ** 4
        assert np.abs(series.dists[:, 0] - expected).max() <= 1e-8

    def test_times_increase_and_dists_normalised(self):
        series = integrate(WalkConfig(n=6, gamma=0.3), TimeGrid(t_end=7.0, dt=0.01))
        assert np.all(np.diff(series.times) > 0)
        np.testing.assert_allclose(series.dists.sum(axis=1), 1.0, atol=1e-10)

    def test_fourth_order_step_halving(self):
        # Errors at dt and dt/2 sit well above the rounding floor, so the
        # ratio shows the h^4 order of the scheme.
        config = WalkConfig(n=5, gamma=1.0)
        op = build_full_operator(config).matrix
        exact = (scipy.linalg.expm(op * 10.0) @ initial_state(config).ravel())
        errors = []
        for dt in (0.1, 0.05):
            series = integrate(config, TimeGrid(t_end=10.0, dt=dt, sample_stride=1000))
            diag = exact.reshape(5, 5).diagonal()
            errors.append(np.abs(series.dists[-1] - diag).max())
        assert errors[0] / errors[1] >= 8.0

    def test_rho_model_stays_positive_and_hermitian(self):
        config = WalkConfig(n=6, gamma=0.3)
        series = integrate(
            config, TimeGrid(t_end=30.0, dt=1e-2, sample_stride=10),
            model="rho", keep_states=True,
        )
        assert series.dists.min() >= -1e-10
        worst = max(np.abs(m - m.conj().T).max() for m in series.states)
        assert worst <= 1e-12

    def test_s_literal_states_stay_symmetric(self):
        config = WalkConfig(n=5, gamma=0.8)
        series = integrate(
            config, TimeGrid(t_end=10.0, dt=1e-2), keep_states=True
        )
        worst = max(np.abs(m - m.T).max() for m in series.states)
        assert worst <= 1e-12

    def test_representation_diagonals_agree_for_multiple_of_four(self):
        for n in (4, 8):
            grid = TimeGrid(t_end=10.0, dt=1e-3, sample_stride=100)
            s_series = integrate(WalkConfig(n=n, gamma=1.0), grid, model="s-literal")
            r_series = integrate(WalkConfig(n=n, gamma=1.0), grid, model="rho")
            assert np.abs(s_series.dists - r_series.dists).max() <= 1e-8

    def test_custom_initial_state(self):
        rng = np.random.default_rng(10)
        config = WalkConfig(n=4, gamma=0.6)
        s0 = random_symmetric(rng, 4)
        s0 += (1.0 - np.trace(s0)) / 4 * np.eye(4)
        series = integrate(config, TimeGrid(t_end=5.0, dt=1e-3, sample_stride=100), initial=s0)
        expected = exact_evolve(config, 5.0, initial=s0)
        np.testing.assert_allclose(series.dists[-1], expected.diagonal(), atol=1e-9)

    def test_rejects_complex_initial_for_s_literal(self):
        config = WalkConfig(n=4, gamma=0.1)
        bad = np.eye(4, dtype=complex) / 4
        bad[0, 1] = 0.1j
        with pytest.raises(ValueError):
            integrate(config, TimeGrid(t_end=1.0), initial=bad)


class TestDiagonalPropagator:
    def test_matches_exact_evolve(self):
        config = WalkConfig(n=6, gamma=0.8)
        prop = DiagonalPropagator(config)
        assert prop.mode == "eig"
        for t in (0.0, 1.7, 25.0, 400.0):
            np.testing.assert_allclose(
                prop.distribution(t), exact_evolve(config, t).diagonal(), atol=1e-10
            )

    def test_grid_evaluation_matches_pointwise(self):
        config = WalkConfig(n=5, gamma=2.0)
        prop = DiagonalPropagator(config)
        times = np.linspace(0.0, 40.0, 17)
        grid = prop.distributions(times)
        pointwise = np.array([prop.distribution(float(t)) for t in times])
        np.testing.assert_allclose(grid, pointwise, atol=1e-12)

    def test_undamped_generator_is_normal_enough(self):
        prop = DiagonalPropagator(WalkConfig(n=7, gamma=0.0))
        assert prop.mode == "eig"
        np.testing.assert_allclose(prop.distribution(0.0), initial_state(WalkConfig(n=7)).diagonal(), atol=1e-12)
