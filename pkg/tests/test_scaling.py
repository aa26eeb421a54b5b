import numpy as np
import pytest

from mulmin import oracle
from mulmin.minimax import solve_minimax
from mulmin.multilinear import MixedProfile, SelectorWeights, deviation_payoffs, expected_payoffs
from mulmin.scaling import random_weights, scale, scaling_iterate, scaling_step, trace_csv
from mulmin.tensor import PayoffTensor, random_game


class TestScale:
    def test_uniform(self):
        t = random_game((2, 3, 2), 1)
        np.testing.assert_array_equal(scale(t, SelectorWeights.uniform(3)).payoffs, t.payoffs * (1 / 3))

    def test_zero(self):
        t = PayoffTensor.zeros((2, 2))
        assert scale(t, [0.3, 0.7]) == t

    def test_pennies(self, pennies):
        s = scale(pennies, [2 / 3, 1 / 3])
        np.testing.assert_array_equal(s.payoffs[0], pennies.payoffs[0] * (2 / 3))
        np.testing.assert_array_equal(s.payoffs[1], pennies.payoffs[1] * (1 / 3))
        np.testing.assert_allclose(s.payoffs[0], -2 * s.payoffs[1])

    @pytest.mark.parametrize("d", [[0.0, 1.0], [1.0]])
    def test_rejects(self, pennies, d):
        with pytest.raises(ValueError):
            scale(pennies, d)

    def test_gain_differences_scale(self):
        rng = np.random.default_rng(0)
        for k in range(20):
            counts = [(2, 2), (3, 2), (2, 2, 2)][k % 3]
            t = random_game(counts, k)
            d = random_weights(rng, len(counts))
            st = scale(t, d)
            p = MixedProfile(tuple(rng.dirichlet(np.ones(c)) for c in counts))
            e, es = expected_payoffs(t, p), expected_payoffs(st, p)
            for i in range(len(counts)):
                lhs = deviation_payoffs(st, i, p) - es[i]
                rhs = d.weights[i] * (deviation_payoffs(t, i, p) - e[i])
                np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-15)


class TestStep:
    def test_uniform_matches_unscaled(self):
        for seed in range(10):
            t = random_game((2, 3), seed)
            step = scaling_step(t, SelectorWeights.uniform(2))
            base = solve_minimax(t)
            assert step.solution.value == pytest.approx(base.value / 2, abs=1e-8)
            assert step.solution.p_star == base.p_star

    def test_one_player(self):
        t = PayoffTensor.from_flat([3], [[1.0, 4.0, 2.0]])
        step = scaling_step(t, [1.0])
        assert step.d_next.tolist() == [1.0] and step.sigma == 1.0
        assert step.solution.value == 4.0 and step.single_player_bound == (0, 4.0)

    def test_next_weights_in_simplex(self):
        rng = np.random.default_rng(1)
        for k in range(20):
            t = random_game((2, 2, 2), k)
            step = scaling_step(t, random_weights(rng, 3))
            assert step.d_next.min() >= 0 and abs(step.d_next.sum() - 1) <= 1e-12
            assert step.sigma > 0

    def test_lp_anchored_bound(self):
        # sum d'_i A_i[p_eq] <= value(d) / sigma holds for every equilibrium
        t = random_game((2, 2), 3)
        step = scaling_step(t, [0.9, 0.1])
        for cert in oracle.certificates(t):
            assert step.bound_lhs(t, cert.profile) <= step.solution.value / step.sigma + 1e-9


class TestIterate:
    def test_one_player_fixed_at_step_zero(self):
        tr = scaling_iterate(PayoffTensor.from_flat([2], [[3.0, 5.0]]), [1.0])
        assert tr.stop_reason == "converged" and len(tr.steps) == 1

    def test_constant_recorded(self):
        tr = scaling_iterate(PayoffTensor.constant((2, 2), 1.0), [0.5, 0.5])
        assert tr.stop_reason in ("converged", "boundary_hit")
        assert len(tr.steps) >= 1

    def test_boundary_records_single_player_bound(self):
        t = random_game((2, 3), 42)
        tr = scaling_iterate(t, [0.5, 0.5])
        assert tr.stop_reason == "boundary_hit"
        i, bound = tr.steps[-1].single_player_bound
        for cert in oracle.certificates(t):
            assert expected_payoffs(t, cert.profile)[i] <= bound + 1e-9

    def test_rejects_boundary_start(self, pennies):
        with pytest.raises(ValueError):
            scaling_iterate(pennies, [1.0, 0.0])

    def test_max_iters(self, pennies):
        tr = scaling_iterate(pennies, [0.3, 0.7], max_iters=1, conv_tol=1e-300)
        assert len(tr.steps) == 1 and tr.stop_reason in ("max_iters", "boundary_hit", "converged")

    def test_solver_failure_keeps_partial_trace(self):
        from mulmin.lp import LpSolution, simplex_solve
        calls = {"n": 0}

        def flaky(lp):
            calls["n"] += 1
            return simplex_solve(lp) if calls["n"] <= 2 else LpSolution("failed", message="stall")

        tr = scaling_iterate(random_game((2, 2, 2), 0), [0.2, 0.3, 0.5], solver=flaky)
        assert tr.stop_reason == "solver_failure" and len(tr.steps) == 1 and "stall" in tr.error

    def test_csv(self):
        tr = scaling_iterate(random_game((2, 3), 42), [0.5, 0.5])
        lines = trace_csv(tr).splitlines()
        assert lines[0] == "iter,d_1,d_2,sigma,value,dprime_1,dprime_2,bound_rhs,t,eps,stop_reason"
        assert lines[-1].endswith(",boundary_hit")
        assert len(lines) == len(tr.steps) + 1
