import numpy as np
import pytest
from scipy.optimize import brentq

from qmask.bounds import (
    SQRT2,
    epsilon_from_delta_fidelity,
    epsilon_from_delta_linear,
    epsilon_over_state_set,
    lemma1_solve,
    probabilistic_witness_pair,
    rank_trace_bound_check,
    theoretical_bound,
    trace_bound_fidelity,
    trace_bound_linear,
    verify_claim_step,
    witness_delta_probabilistic,
    witness_delta_unitary,
)
from qmask.campaigns import random_orthonormal_pair, random_probabilistic_masker
from qmask.errors import DimensionError, NormalizationError
from qmask.linalg import haar_unitary
from qmask.masking import ProbabilisticMasker, UnitaryMasker, cnot_phase_masker, phase_state
from qmask.states import BipartitePureState, basis, random_bipartite_state, random_ket


def positive_root(a, b, c):
    roots = np.roots([a, b, c])
    return max(r.real for r in roots if abs(r.imag) < 1e-14)


class TestTheoreticalBound:
    @pytest.mark.parametrize("t", range(2, 65))
    def test_roots(self, t):
        b = theoretical_bound(t, t + 3)
        assert b.t == t
        assert abs(b.epsilon_residual) <= 1e-12 and abs(b.delta_residual) <= 1e-12
        assert b.epsilon_star == pytest.approx(positive_root(72, 2 * SQRT2, -1 / t), abs=1e-12)
        assert b.delta_star == pytest.approx(positive_root(9, 1, -1 / t), abs=1e-12)
        assert abs(b.epsilon_star - b.delta_star / (2 * SQRT2)) <= 1e-14
        assert b.max_fidelity == pytest.approx(1 - b.epsilon_star)

    def test_qubit_values(self):
        b = theoretical_bound(2, 2)
        assert b.epsilon_star == pytest.approx(0.0659752, abs=1e-6)
        assert b.delta_star == pytest.approx(0.1866055, abs=1e-6)
        # closed form sqrt(2)/72 (sqrt(19) - 1)
        assert b.epsilon_star == pytest.approx(np.sqrt(2) / 72 * (np.sqrt(19) - 1), abs=1e-15)

    def test_t4(self):
        # positive root of 72 e^2 + 2 sqrt 2 e - 1/4
        assert theoretical_bound(4, 4).epsilon_star == pytest.approx(0.0424711, abs=1e-6)

    def test_t_is_min(self):
        a, b = theoretical_bound(2, 17), theoretical_bound(2, 2)
        assert a.t == 2
        assert (a.delta_star, a.epsilon_star) == (b.delta_star, b.epsilon_star)

    def test_large_t_limit(self):
        t = 10**6
        assert theoretical_bound(t, t).delta_star * t == pytest.approx(1, abs=1e-4)

    def test_strictly_decreasing(self):
        eps = [theoretical_bound(t, t).epsilon_star for t in range(2, 65)]
        assert all(a > b for a, b in zip(eps, eps[1:]))

    def test_small_dims_rejected(self):
        with pytest.raises(DimensionError):
            theoretical_bound(1, 3)

    def test_quadratic_implies_delta_at_least_bound(self):
        # for delta >= 0, 9 delta^2 + delta - 1/t >= 0 exactly when delta >= delta_star
        for t in (2, 3, 7, 40):
            ds = theoretical_bound(t, t).delta_star
            for d in np.linspace(0, 3, 3001):
                holds = 9 * d * d + d - 1 / t >= 0
                assert holds == (d >= ds) or abs(d - ds) < 1e-12

    def test_exact_masking_violates_quadratic(self):
        for t in range(2, 30):
            assert 9 * 0.0**2 + 0.0 - 1 / t == -1 / t < 0


class TestConversions:
    def test_linear(self):
        assert trace_bound_linear(0.1) == pytest.approx(0.2 * np.sqrt(2))
        assert epsilon_from_delta_linear(trace_bound_linear(0.03)) == pytest.approx(0.03)

    def test_fidelity_route_inverse(self):
        for eps in (0.0, 1e-6, 0.01, 0.3, 1.0):
            assert epsilon_from_delta_fidelity(trace_bound_fidelity(eps)) == pytest.approx(eps, abs=1e-12)

    def test_fidelity_route_is_looser_for_small_eps(self):
        for eps in (1e-4, 0.01, 0.1):
            assert trace_bound_fidelity(eps) > trace_bound_linear(eps)


class TestWitnessUnitary:
    def test_identity_fixture(self):
        m = UnitaryMasker(np.eye(4), basis(2, 0), 2, 2)
        rep = witness_delta_unitary(m, basis(2, 0), basis(2, 1))
        assert rep.norm_a_side == pytest.approx(2)
        assert rep.norm_b_side == pytest.approx(0, abs=1e-15)
        assert rep.norm_omega_1 == pytest.approx(np.sqrt(2))
        assert rep.norm_omega_2 == pytest.approx(np.sqrt(2))
        assert rep.delta == pytest.approx(2)
        assert rep.quadratic_slack == pytest.approx(37.5)
        assert rep.implied_epsilon == pytest.approx(2 / (2 * np.sqrt(2)))

    def test_images_with_equal_marginals(self):
        # CNOT on |+>, |->: two Bell states, both marginals I/2
        plus, minus = phase_state([0, 0]), phase_state([0, np.pi])
        rep = witness_delta_unitary(cnot_phase_masker(2), plus, minus)
        assert rep.norm_a_side == pytest.approx(0, abs=1e-14)
        assert rep.norm_b_side == pytest.approx(0, abs=1e-14)
        assert rep.delta == pytest.approx(max(rep.norm_omega_1, rep.norm_omega_2))
        assert rep.delta > 0.5

    def test_rejects_non_orthogonal(self):
        m = UnitaryMasker(np.eye(4), basis(2, 0), 2, 2)
        with pytest.raises(NormalizationError):
            witness_delta_unitary(m, basis(2, 0), phase_state([0, 0]))

    def test_monte_carlo_chain(self):
        rng = np.random.default_rng(3)
        for i in range(2000):
            r, s = 2 + i % 4, 2 + (i // 4) % 4
            m = UnitaryMasker(haar_unitary(r * s, rng), random_ket(s, rng), r, s)
            rep = witness_delta_unitary(m, *random_orthonormal_pair(r, rng))
            assert rep.quadratic_slack >= -1e-9
            assert rep.chain_violations() == []
            assert rep.delta == max(rep.norm_a_side, rep.norm_b_side, rep.norm_omega_1, rep.norm_omega_2)
            assert rep.delta >= theoretical_bound(r, s).delta_star - 1e-9


class TestWitnessProbabilistic:
    def test_isometry_matches_unitary(self, rng):
        for r, s in [(2, 2), (3, 2), (2, 4), (4, 3)]:
            um = UnitaryMasker(haar_unitary(r * s, rng), random_ket(s, rng), r, s)
            pm = ProbabilisticMasker.from_unitary_masker(um)
            pair = probabilistic_witness_pair(pm)
            assert pair.overlap_r == pytest.approx(0, abs=1e-12)
            # the probabilistic chain compares against psi1, the unitary one against its second image
            ru = witness_delta_unitary(um, pair.a2, pair.a1)
            rp = witness_delta_probabilistic(pm)
            for field in ("norm_a_side", "norm_b_side", "norm_omega_1", "norm_omega_2", "delta", "quadratic_slack"):
                assert getattr(rp, field) == pytest.approx(getattr(ru, field), abs=1e-10)

    def test_scale_invariance(self, rng):
        um = UnitaryMasker(haar_unitary(6, rng), basis(3, 0), 2, 3)
        full = witness_delta_probabilistic(ProbabilisticMasker.from_unitary_masker(um))
        scaled = witness_delta_probabilistic(ProbabilisticMasker.from_unitary_masker(um, 0.7))
        assert scaled.delta == pytest.approx(full.delta, abs=1e-12)

    def test_witness_pair_properties(self, rng):
        for _ in range(200):
            pm = random_probabilistic_masker(3, 3, rng)
            pair = probabilistic_witness_pair(pm)
            assert abs(pair.psi1.inner(pair.psi2)) < 1e-10
            assert 0 <= pair.overlap_r < 1
            assert np.vdot(pair.a1, pair.a2).real == pytest.approx(pair.overlap_r, abs=1e-12)
            assert np.allclose(pm.linear_map @ pair.a1, pair.p1 * pair.psi1.amplitudes)
            assert np.allclose(pm.linear_map @ pair.a2, pair.p2 * pair.psi2.amplitudes)

    def test_balanced_superpositions_realized(self, rng):
        # the Lemma 1 input lands on (psi1 + e^{i theta} psi2)/sqrt 2
        pm = random_probabilistic_masker(3, 2, rng)
        pair = probabilistic_witness_pair(pm)
        for theta in (0.0, np.pi / 2, 2.0):
            sol = lemma1_solve(pair.overlap_r, theta, pair.p1, pair.p2)
            vec = sol.x * pair.a1 + sol.y * np.exp(1j * theta) * pair.a2
            assert np.linalg.norm(vec) == pytest.approx(1, abs=1e-12)
            img = pm.linear_map @ vec
            target = (pair.psi1.amplitudes + np.exp(1j * theta) * pair.psi2.amplitudes) / np.sqrt(2)
            assert np.allclose(img / np.linalg.norm(img), target, atol=1e-12)

    def test_monte_carlo(self):
        rng = np.random.default_rng(4)
        for i in range(2000):
            r, s = 2 + i % 4, 2 + (i // 4) % 4
            rep = witness_delta_probabilistic(random_probabilistic_masker(r, s, rng))
            assert rep.quadratic_slack >= -1e-9
            assert rep.chain_violations() == []


class TestStateSetEpsilon:
    def test_exact_family(self, rng):
        inputs = [phase_state(rng.uniform(0, 6.3, 3)) for _ in range(20)]
        eps = epsilon_over_state_set(cnot_phase_masker(3), inputs)
        assert eps.eps_trace <= 1e-10 and eps.eps_fidelity <= 1e-10

    def test_identity_on_basis(self):
        eps = epsilon_over_state_set(UnitaryMasker(np.eye(4), basis(2, 0), 2, 2), [basis(2, 0), basis(2, 1)])
        assert eps.eps_trace == pytest.approx(2)
        assert eps.eps_fidelity == pytest.approx(1)

    def test_relation_between_measures(self, rng):
        for _ in range(200):
            r, s = rng.integers(2, 4, size=2)
            m = UnitaryMasker(haar_unitary(int(r * s), rng), random_ket(int(s), rng), int(r), int(s))
            inputs = [random_ket(int(r), rng) for _ in range(4)]
            eps = epsilon_over_state_set(m, inputs)
            assert eps.eps_trace <= 2 * np.sqrt(1 - (1 - eps.eps_fidelity) ** 2) + 1e-8


def lemma1_oracle(r, theta, p1, p2):
    # brute force: root of the ellipse equation along the ray y = (p1/p2) x
    f = lambda x: x * x + 2 * r * np.cos(theta) * x * (p1 * x / p2) + (p1 * x / p2) ** 2 - 1
    return brentq(f, 0, 100, xtol=1e-15)


class TestLemma1:
    def test_circle(self):
        for theta in (0, 1, 2.5):
            sol = lemma1_solve(0.0, theta, 1, 1)
            assert sol.x == pytest.approx(1 / np.sqrt(2)) and sol.y == pytest.approx(1 / np.sqrt(2))

    def test_reference_parameters(self):
        sol = lemma1_solve(0.9, np.pi / 2, 5, 1)
        assert sol.x == pytest.approx(1 / np.sqrt(26), abs=1e-9)
        assert lemma1_solve(0.9, 0, 1, 1).x == pytest.approx(1 / np.sqrt(3.8), abs=1e-12)

    def test_against_root_finder(self, rng):
        for _ in range(200):
            r, theta = rng.uniform(0, 0.99), rng.uniform(0, 2 * np.pi)
            p1, p2 = rng.uniform(0.05, 5, 2)
            assert lemma1_solve(r, theta, p1, p2).x == pytest.approx(lemma1_oracle(r, theta, p1, p2), abs=1e-10)

    def test_residuals(self, rng):
        for _ in range(1000):
            sol = lemma1_solve(rng.uniform(0, 1), rng.uniform(0, 2 * np.pi), *rng.uniform(0.01, 10, 2))
            assert sol.ellipse_residual <= 1e-12 and sol.line_residual <= 1e-12

    @pytest.mark.parametrize("args", [(1.0, 0, 1, 1), (-0.1, 0, 1, 1), (0.5, 0, 0, 1), (0.5, 0, 1, -2)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            lemma1_solve(*args)


class TestClaimStep:
    def test_equal_states(self, rng):
        psi = random_bipartite_state(2, 3, rng)
        c = verify_claim_step(psi, psi)
        assert c.lhs == pytest.approx(0, abs=1e-15) and c.rhs_trace == pytest.approx(0, abs=1e-15)

    def test_orthogonal_products(self):
        # L = |1><1| - |0><0|, Tr(M^dag M L) = -1
        c = verify_claim_step(BipartitePureState(basis(4, 0), 2, 2), BipartitePureState(basis(4, 3), 2, 2))
        assert c.lhs == pytest.approx(1)
        assert c.rhs_frobenius == pytest.approx(np.sqrt(2))
        assert c.rhs_trace == pytest.approx(2)

    def test_chain(self, rng):
        for _ in range(500):
            r, s = (int(x) for x in rng.integers(2, 6, size=2))
            c = verify_claim_step(random_bipartite_state(r, s, rng), random_bipartite_state(r, s, rng))
            assert c.lhs <= c.rhs_frobenius + 1e-9 and c.rhs_frobenius <= c.rhs_trace + 1e-9


class TestRankTrace:
    def test_product(self):
        chk = rank_trace_bound_check(BipartitePureState(basis(6, 0), 2, 3))
        assert chk.lhs == pytest.approx(1) and chk.rhs == pytest.approx(0.5)

    def test_maximally_entangled(self):
        for t in (2, 3, 5):
            psi = BipartitePureState.from_matrix(np.eye(t) / np.sqrt(t))
            chk = rank_trace_bound_check(psi)
            assert chk.lhs == pytest.approx(1 / t, abs=1e-14)

    def test_random(self, rng):
        for _ in range(500):
            r, s = (int(x) for x in rng.integers(2, 6, size=2))
            chk = rank_trace_bound_check(random_bipartite_state(r, s, rng))
            assert chk.lhs >= chk.rhs - 1e-12
