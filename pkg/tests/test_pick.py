import numpy as np
import pytest

from hardyrp.pick import (
    BlaschkePotapovProduct,
    MobiusTransform,
    RationalPickFunction,
    blaschke_factor,
    boundary_unitary,
    bp_degree,
    bp_eval,
    compose_scalar,
    degree_rank,
    degree_winding,
    dump_pick,
    is_pick,
    is_regular,
    load_pick,
    multiplicity_winding,
    pick_eval,
)


def worked_example() -> RationalPickFunction:
    # F(z) = [[1, 1], [1, z]]
    return RationalPickFunction(
        np.array([[1, 1], [1, 0]], dtype=complex),
        np.array([[0, 0], [0, 1]], dtype=complex),
    )


def random_pick(rng: np.random.Generator, dim: int,
                n_poles: int) -> RationalPickFunction:
    def psd(rank):
        B = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
        return B @ B.conj().T

    C = rng.normal(size=(dim, dim))
    C = (C + C.T) / 2 + 0j
    D = psd(rng.integers(0, dim + 1))
    locs = np.sort(rng.uniform(-5, 5, size=n_poles))
    poles = tuple((float(l), psd(rng.integers(1, dim + 1))) for l in locs)
    return RationalPickFunction(C, D, poles)


class TestConstruction:
    def test_non_hermitian_c_rejected(self):
        with pytest.raises(ValueError):
            RationalPickFunction(np.array([[0, 1], [0, 0]], dtype=complex),
                                 np.zeros((2, 2)))

    def test_indefinite_d_rejected(self):
        with pytest.raises(ValueError):
            RationalPickFunction(np.zeros((2, 2)), -np.eye(2))

    def test_duplicate_poles_rejected(self):
        A = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            RationalPickFunction(np.zeros((2, 2)), np.zeros((2, 2)),
                                 ((1.0, A), (1.0, A)))

    def test_eval_at_pole_raises(self):
        F = RationalPickFunction.scalar(0.0, 0.0, [(2.0, 1.0)])
        with pytest.raises(ZeroDivisionError):
            pick_eval(F, 2.0)

    def test_json_round_trip(self):
        F = random_pick(np.random.default_rng(3), 2, 2)
        F2 = load_pick(dump_pick(F))
        z = 0.3 + 1.1j
        assert np.abs(pick_eval(F, z) - pick_eval(F2, z)).max() < 1e-14


class TestPickAndRegular:
    def test_worked_example_is_pick_and_regular(self):
        F = worked_example()
        assert is_pick(F)
        assert is_regular(F)

    def test_constant_hermitian_is_pick_not_regular(self):
        F = RationalPickFunction(np.eye(2, dtype=complex), np.zeros((2, 2)))
        assert is_pick(F)
        assert not is_regular(F)

    def test_negated_pick_rejected(self):
        F = worked_example()
        assert not is_pick(lambda z: -pick_eval(F, z))

    @pytest.mark.parametrize("seed", range(5))
    def test_random_functions_are_pick(self, seed):
        rng = np.random.default_rng(seed)
        F = random_pick(rng, int(rng.integers(1, 4)), int(rng.integers(0, 3)))
        assert is_pick(F)


class TestDegree:
    def test_worked_example_all_methods(self):
        F = worked_example()
        assert degree_rank(F) == 1
        assert multiplicity_winding(F) == 1
        assert degree_winding(F) == 1

    def test_off_axis_parameter(self):
        F = worked_example()
        lam = 1 + 2j
        assert multiplicity_winding(F, lam=lam) == 1
        assert degree_winding(F, lam=lam) == 1

    def test_rank_counts_pole_residues(self):
        A1 = np.array([[2, 1], [1, 1]], dtype=complex)       # rank 2
        A2 = np.outer([1, 1j], [1, -1j])                     # rank 1
        F = RationalPickFunction(np.zeros((2, 2)), np.zeros((2, 2)),
                                 ((0.0, A1), (3.0, A2)))
        assert degree_rank(F) == 3
        assert multiplicity_winding(F) == 3
        assert degree_winding(F) == 3

    @pytest.mark.parametrize("seed", range(8))
    def test_triple_agreement_random(self, seed):
        rng = np.random.default_rng(100 + seed)
        F = random_pick(rng, int(rng.integers(1, 4)), int(rng.integers(0, 4)))
        d = degree_rank(F)
        assert multiplicity_winding(F) == d
        assert degree_winding(F) == d


class TestBlaschkePotapov:
    def factorization(self):
        # phi_i applied to the worked example equals u (phi_omega P + 1 - P)
        omega = 0.5 + 1.5j
        u = np.diag([-1j, 1.0])
        P = np.array([[1 / 3, -(1 + 1j) / 3], [-(1 - 1j) / 3, 2 / 3]])
        return BlaschkePotapovProduct(u, ((omega, P),))

    def test_projection_validated(self):
        with pytest.raises(ValueError):
            BlaschkePotapovProduct(np.eye(2),
                                   ((1j, np.array([[1, 1], [0, 0]])),))

    def test_degree_is_projection_rank(self):
        assert bp_degree(self.factorization()) == 1

    def test_matches_transformed_example(self):
        from hardyrp.pick import _matrix_blaschke
        F = worked_example()
        phi = self.factorization()
        for z in (2 + 1.3j, -1 + 0.5j, 3j):
            lhs = _matrix_blaschke(pick_eval(F, z), 1j)
            assert np.abs(lhs - bp_eval(phi, z)).max() < 1e-12

    def test_unimodular_on_real_axis(self):
        phi = self.factorization()
        for x in (-2.0, 0.3, 5.0):
            M = bp_eval(phi, x)
            assert np.abs(M.conj().T @ M - np.eye(2)).max() < 1e-12

    def test_scalar_blaschke_modulus(self):
        w = 1 + 2j
        assert abs(abs(blaschke_factor(w, 3.0)) - 1.0) < 1e-14
        assert abs(blaschke_factor(w, w)) == 0.0


class TestComposition:
    def test_mobius_normalization(self):
        with pytest.raises(ValueError):
            MobiusTransform(2.0, 0.0, 0.0, 1.0)

    def test_mobius_as_pick_agrees(self):
        m = MobiusTransform(0.0, 1.0, -1.0, 0.0)   # z -> -1/z
        F = m.as_pick()
        for z in (1j, 2 + 1j):
            assert abs(pick_eval(F, z)[0, 0] - m(z)) < 1e-14
        assert degree_rank(F) == 1

    def test_degree_multiplicative(self):
        f = MobiusTransform(0.0, 1.0, -1.0, 0.0).as_pick()      # degree 1
        F = worked_example()                                     # degree 1
        g = RationalPickFunction.scalar(0.0, 1.0, [(1.0, 1.0)])  # degree 2
        comp = compose_scalar(f, F, g)
        assert multiplicity_winding(comp) == 2

    def test_mobius_conjugation_preserves_degree(self):
        m = MobiusTransform(1.0, 1.0, 0.0, 1.0)                  # z -> z + 1
        F = worked_example()
        comp = compose_scalar(m.as_pick(), F, m.as_pick())
        assert multiplicity_winding(comp) == degree_rank(F)

    def test_eigenvalue_ordering_deterministic(self):
        F = worked_example()
        f = MobiusTransform(1.0, 0.0, 0.0, 1.0).as_pick()
        comp = compose_scalar(f, F, f)
        z = 0.7 + 0.9j
        assert np.abs(comp(z) - pick_eval(F, z)).max() < 1e-10


class TestBoundaryUnitary:
    @pytest.mark.parametrize("t,x", [(0.0, 1.0), (0.7, 2.0), (-1.3, -0.5)])
    def test_unitary(self, t, x):
        U = boundary_unitary(worked_example(), t, x)
        assert np.abs(U.conj().T @ U - np.eye(2)).max() < 1e-12

    def test_group_law(self):
        F = worked_example()
        x = 1.5
        U = boundary_unitary(F, 0.3, x) @ boundary_unitary(F, 0.4, x)
        assert np.abs(U - boundary_unitary(F, 0.7, x)).max() < 1e-12
