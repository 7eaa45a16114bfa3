import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import reference_h1
from hilbertgame.errors import InvalidDensityError, NotHermitianError, NumericalConsistencyError, RejectedInput
from hilbertgame.game import (
    GameDefinition,
    MixedClassicalStrategy,
    build_payoff_tensor,
    canonical_pd,
    classical_mixture,
    classical_payoff_table,
    classical_submatrix,
    marginal,
    payoff_density_form,
    payoff_operator_form,
    payoff_state_form,
    product_density,
    product_state,
    pure_density,
    split_product,
    validate_density,
)
from hilbertgame.strategy import base_operator, basis_vector, expand, unitary_general, unitary_theta_phi

from conftest import random_complex, random_density, random_hermitian

Nc, Fc, Nq, Fq = (base_operator(n) for n in ("Nc", "Fc", "Nq", "Fq"))
payoff_value = st.floats(-10, 10, allow_nan=False)


def idx(a, b):
    names = ("Nc", "Fc", "Nq", "Fq")
    return 4 * names.index(a) + names.index(b)


def general_game(rng):
    return GameDefinition(random_density(rng, 4), random_hermitian(rng, 4), random_hermitian(rng, 4))


class TestGameDefinition:
    def test_canonical(self, pd_game):
        assert_allclose(pd_game.p1, np.diag([3, 0, 5, 1]))
        assert_allclose(pd_game.p2, np.diag([3, 5, 0, 1]))
        assert np.trace(pd_game.rho0) == 1
        assert np.trace(pd_game.p1 @ pd_game.rho0) == 3

    def test_rejects_non_hermitian_scale(self):
        p = np.diag([1.0, 2, 3, 4]).astype(complex)
        p[0, 1] = 1.0
        with pytest.raises(NotHermitianError):
            GameDefinition(canonical_pd(1, 2, 3, 4).rho0, p, np.eye(4))

    def test_rejects_bad_rho0(self):
        with pytest.raises(InvalidDensityError):
            GameDefinition(np.eye(4), np.eye(4), np.eye(4))
        with pytest.raises(InvalidDensityError):
            GameDefinition(np.diag([1.5, -0.5, 0, 0]), np.eye(4), np.eye(4))

    def test_rejects_wrong_shape(self):
        with pytest.raises(RejectedInput):
            GameDefinition(np.eye(2) / 2, np.eye(2), np.eye(2))

    def test_caller_arrays_stay_writable(self):
        rho0 = np.zeros((4, 4), dtype=complex)
        rho0[0, 0] = 1
        p = np.eye(4, dtype=complex)
        GameDefinition(rho0, p, p)
        rho0[1, 1] = 0.0
        p[0, 0] = 2.0

    def test_diagonal_product_flag(self, pd_game, rng):
        assert pd_game.is_diagonal_product_game
        assert not general_game(rng).is_diagonal_product_game


class TestOperatorForm:
    def test_reward(self, pd_game):
        assert payoff_operator_form(pd_game, Nc, Nc, 1) == pytest.approx(3)
        assert payoff_operator_form(pd_game, Nc, Nc, 2) == pytest.approx(3)

    def test_punishment(self, pd_game):
        assert payoff_operator_form(pd_game, Fc, Fc, 1) == pytest.approx(1)

    def test_pareto_profile(self, pd_game):
        u = unitary_theta_phi(0, np.pi / 2)
        assert payoff_operator_form(pd_game, u, u, 1) == pytest.approx(3, abs=1e-12)

    def test_classical_table(self):
        g = canonical_pd(3, 0, 5, 1)
        assert_allclose(classical_payoff_table(g, 1), [[3, 0], [5, 1]])
        assert_allclose(classical_payoff_table(g, 2), [[3, 5], [0, 1]])

    def test_broadcasts(self, pd_game, rng):
        u1 = random_complex(rng, (7, 2, 2))
        u2 = random_complex(rng, (7, 2, 2))
        batch = payoff_operator_form(pd_game, u1, u2, 1)
        single = [payoff_operator_form(pd_game, a, b, 1) for a, b in zip(u1, u2)]
        assert_allclose(batch, single)

    def test_imaginary_payoff_rejected(self):
        # a non-Hermitian scale slipped past validation must be caught, not truncated
        g = canonical_pd(1, 2, 3, 4)
        p = np.zeros((4, 4), dtype=complex)
        p[0, 0] = 1j
        object.__setattr__(g, "p1", p)
        with pytest.raises(NumericalConsistencyError):
            payoff_operator_form(g, Nc, Nc, 1)


class TestPayoffTensor:
    @pytest.mark.parametrize("rstp", [(3, 0, 5, 1), (3, 1, 5, 2), (0.3, -2.0, 7.5, 1.25)])
    def test_reference_matrix(self, rstp):
        r, s, t, p = rstp
        g = canonical_pd(*rstp)
        assert np.abs(build_payoff_tensor(g, 1) - reference_h1.evaluate(r, s, t, p)).max() == 0.0
        assert np.abs(build_payoff_tensor(g, 2) - reference_h1.evaluate(r, t, s, p)).max() == 0.0

    def test_spot_entries(self):
        h = build_payoff_tensor(canonical_pd(3, 1, 5, 2), 1)
        assert h[idx("Nc", "Nc"), idx("Nc", "Nc")] == 3
        assert h[idx("Nc", "Fc"), idx("Nc", "Fq")] == 1j
        assert h[idx("Fc", "Fc"), idx("Fq", "Fq")] == -2

    def test_hermitian_general(self, rng):
        for _ in range(10):
            h = build_payoff_tensor(general_game(rng), 1)
            assert np.linalg.norm(h - h.conj().T) <= 1e-12 * np.linalg.norm(h)

    def test_element_definition(self, rng):
        # H[a, b] = Tr(P (b1⊗b2) rho0 (a1⊗a2)^†), checked element-wise by explicit loops
        g = general_game(rng)
        h = build_payoff_tensor(g, 2)
        names = ("Nc", "Fc", "Nq", "Fq")
        for a1 in names:
            for a2 in names:
                ka = np.kron(base_operator(a1), base_operator(a2))
                for b1 in names:
                    for b2 in names:
                        kb = np.kron(base_operator(b1), base_operator(b2))
                        expected = np.trace(g.p2 @ kb @ g.rho0 @ ka.conj().T)
                        assert abs(h[idx(a1, a2), idx(b1, b2)] - expected) <= 1e-12

    def test_tensor_cache(self, pd_game):
        assert pd_game.tensor(1) is pd_game.tensor(1)


def _theorem_discrepancy(g, u1, u2, player):
    op = payoff_operator_form(g, u1, u2, player)
    states = np.einsum("na,nb->nab", expand(u1), expand(u2)).reshape(-1, 16)
    st_ = payoff_state_form(build_payoff_tensor(g, player), states)
    return np.max(np.abs(op - st_) / np.maximum(1, np.abs(op)))


class TestTheorem:
    def test_arbitrary_operators(self, pd_game, rng):
        u1 = random_complex(rng, (1000, 2, 2))
        u2 = random_complex(rng, (1000, 2, 2))
        for player in (1, 2):
            assert _theorem_discrepancy(pd_game, u1, u2, player) <= 1e-10

    def test_general_game(self, rng):
        g = general_game(rng)
        u1 = random_complex(rng, (300, 2, 2))
        u2 = random_complex(rng, (300, 2, 2))
        for player in (1, 2):
            assert _theorem_discrepancy(g, u1, u2, player) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(payoff_value, payoff_value, payoff_value, payoff_value,
           st.tuples(*[st.floats(-np.pi, np.pi)] * 6))
    def test_unitary_profiles(self, r, s, t, p, angles):
        g = canonical_pd(r, s, t, p)
        u1 = unitary_general(*angles[:3])[None]
        u2 = unitary_general(*angles[3:])[None]
        for player in (1, 2):
            assert _theorem_discrepancy(g, u1, u2, player) <= 1e-10


class TestStateAndDensityForms:
    def test_base_state(self, pd_game):
        h = build_payoff_tensor(pd_game, 1)
        assert payoff_state_form(h, product_state(basis_vector("Nc"), basis_vector("Nc"))) == 3

    def test_mutual_reward_state(self, pd_game):
        sm = np.zeros(16)
        sm[[0, 2, 8, 10]] = 0.5
        for player in (1, 2):
            h = build_payoff_tensor(pd_game, player)
            assert payoff_state_form(h, sm) == pytest.approx(12)
            assert payoff_density_form(h, pure_density(sm)) == pytest.approx(12)

    def test_pure_density_matches_state(self, pd_game, rng):
        h = build_payoff_tensor(pd_game, 1)
        for _ in range(20):
            s = random_complex(rng, 16)
            s /= np.linalg.norm(s)
            assert abs(payoff_density_form(h, pure_density(s)) - payoff_state_form(h, s)) <= 1e-12

    def test_classical_mixture(self, pd_game):
        h = build_payoff_tensor(pd_game, 1)
        rho = product_density(classical_mixture(0.5), classical_mixture(0.5))
        assert payoff_density_form(h, rho) == pytest.approx((3 + 0 + 5 + 1) / 4)

    def test_invalid_density(self, pd_game):
        h = build_payoff_tensor(pd_game, 1)
        with pytest.raises(InvalidDensityError):
            payoff_density_form(h, np.eye(16))
        with pytest.raises(InvalidDensityError):
            payoff_density_form(h, np.eye(4) / 4)


class TestClassicalSubmatrix:
    def test_diagonals(self):
        r, s, t, p = 3.0, 1.0, 5.0, 2.0
        g = canonical_pd(r, s, t, p)
        assert_allclose(classical_submatrix(build_payoff_tensor(g, 1)), np.diag([r, s, t, p]))
        assert_allclose(classical_submatrix(build_payoff_tensor(g, 2)), np.diag([r, t, s, p]))

    def test_matches_classical_table(self, pd_game_distinct):
        for player in (1, 2):
            sub = classical_submatrix(build_payoff_tensor(pd_game_distinct, player))
            assert_allclose(np.diag(sub), classical_payoff_table(pd_game_distinct, player).ravel())


class TestDensities:
    def test_product_of_pure(self):
        nc = pure_density(basis_vector("Nc"))
        expected = np.zeros((16, 16))
        expected[0, 0] = 1
        assert_allclose(product_density(nc, nc), expected)

    def test_mixed_times_pure(self):
        rho = product_density(classical_mixture(0.5), pure_density(basis_vector("Fc")))
        expected = np.zeros((16, 16))
        expected[idx("Nc", "Fc"), idx("Nc", "Fc")] = 0.5
        expected[idx("Fc", "Fc"), idx("Fc", "Fc")] = 0.5
        assert_allclose(rho, expected)
        assert np.trace(rho) == pytest.approx(1)

    def test_marginals(self, rng):
        a, b = random_density(rng, 4), random_density(rng, 4)
        rho = product_density(a, b)
        assert_allclose(marginal(rho, 1), a, atol=1e-14)
        assert_allclose(marginal(rho, 2), b, atol=1e-14)

    def test_mixture_validation(self):
        with pytest.raises(RejectedInput):
            MixedClassicalStrategy(0.7, 0.7)
        with pytest.raises(RejectedInput):
            classical_mixture(1.5)

    def test_validate_density_dim(self):
        with pytest.raises(InvalidDensityError):
            validate_density(np.eye(4) / 4, 16)


class TestSplitProduct:
    def test_round_trip(self, rng):
        v1, v2 = random_complex(rng, 4), random_complex(rng, 4)
        f1, f2 = split_product(np.kron(v1, v2))
        assert_allclose(np.kron(f1, f2), np.kron(v1, v2), atol=1e-12)
        assert np.linalg.norm(f1) == pytest.approx(np.linalg.norm(f2))

    def test_entangled(self):
        bell = (np.kron(basis_vector("Nc"), basis_vector("Nc")) + np.kron(basis_vector("Fc"), basis_vector("Fc"))) / np.sqrt(2)
        assert split_product(bell) is None
