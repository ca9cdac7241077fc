"""Unit tests for symplectic/passive matrix construction and checks."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from squeezelab import (
    PassiveTransform,
    beam_splitter,
    block_decompose,
    complete_passive,
    epsilon_sum,
    grouped_to_interleaved_indices,
    interleaved_to_grouped_indices,
    is_passive,
    is_symplectic,
    omega,
    passive_to_unitary,
    random_passive,
    reorder_to_grouped,
    reorder_to_interleaved,
    unitary_to_passive,
)
from squeezelab.symplectic import submatrix_asymmetry


class TestOmega:
    """Symplectic form construction"""

    def test_one_mode(self):
        assert np.array_equal(omega(1), np.array([[0.0, 1.0], [-1.0, 0.0]]))

    def test_block_structure(self):
        """omega(n) is the direct sum of n one-mode blocks in interleaved ordering"""
        om = omega(3)
        assert om.shape == (6, 6)
        for k in range(3):
            assert np.array_equal(om[2 * k : 2 * k + 2, 2 * k : 2 * k + 2], omega(1))
        assert np.count_nonzero(om) == 6

    def test_antisymmetric_square(self):
        om = omega(4)
        assert np.array_equal(om.T, -om)
        assert np.array_equal(om @ om, -np.eye(8))

    def test_invalid_mode_count(self):
        with pytest.raises(ValueError, match="mode count"):
            omega(0)


class TestOrdering:
    """Grouped <-> interleaved reindexing"""

    def test_indices_are_inverse_permutations(self):
        for n in (1, 2, 5):
            p = grouped_to_interleaved_indices(n)
            q = interleaved_to_grouped_indices(n)
            assert np.array_equal(p[q], np.arange(2 * n))
            assert np.array_equal(q[p], np.arange(2 * n))

    def test_two_mode_layout(self):
        """(x1, x2, p1, p2) indices 0..3 map to (x1, p1, x2, p2)"""
        assert grouped_to_interleaved_indices(2).tolist() == [0, 2, 1, 3]

    def test_omega_orderings(self):
        """The grouped-ordering form [[0, 1], [-1, 0]] blocks reindexes to omega"""
        n = 3
        eye = np.eye(n)
        grouped = np.block([[0 * eye, eye], [-eye, 0 * eye]])
        assert np.array_equal(reorder_to_interleaved(grouped), omega(n))
        assert np.array_equal(reorder_to_grouped(omega(n)), grouped)

    @settings(deadline=None, max_examples=25)
    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip_exact(self, n, seed):
        m = np.random.default_rng(seed).standard_normal((2 * n, 2 * n))
        assert np.array_equal(reorder_to_grouped(reorder_to_interleaved(m)), m)
        assert np.array_equal(reorder_to_interleaved(reorder_to_grouped(m)), m)

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError, match="even"):
            reorder_to_interleaved(np.zeros((3, 3)))


class TestPredicates:
    """is_symplectic / is_passive classification"""

    def test_identity(self):
        assert is_symplectic(np.eye(6))
        assert is_passive(np.eye(6))

    def test_squeezer_is_symplectic_not_passive(self):
        s = np.diag([2.0, 0.5])
        assert is_symplectic(s)
        assert not is_passive(s)

    def test_rotation_is_passive(self):
        th = 0.7
        r = np.array([[np.cos(th), np.sin(th)], [-np.sin(th), np.cos(th)]])
        assert is_passive(r)

    def test_orthogonal_not_symplectic(self):
        """A quadrature swap is orthogonal but flips the form"""
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert not is_symplectic(swap)
        assert not is_passive(swap)

    def test_generic_matrix_rejected(self):
        assert not is_symplectic(np.full((2, 2), 0.3))

    def test_nonsquare_rejected(self):
        with pytest.raises(ValueError, match="square"):
            is_symplectic(np.zeros((2, 4)))


class TestPassiveTransform:
    """Container validation and immutability"""

    def test_rejects_non_passive(self):
        with pytest.raises(ValueError, match="not passive"):
            PassiveTransform(np.diag([2.0, 0.5]))

    def test_modes(self):
        assert PassiveTransform(np.eye(8)).modes == 4

    def test_matrix_is_read_only(self):
        z = PassiveTransform(np.eye(2))
        with pytest.raises(ValueError):
            z.matrix[0, 0] = 7.0

    def test_defensive_copy(self):
        src = np.eye(2)
        z = PassiveTransform(src)
        src[0, 0] = 5.0
        assert z.matrix[0, 0] == 1.0

    def test_loose_tolerance_admits_noisy_input(self):
        noisy = np.eye(2) + 1e-8
        with pytest.raises(ValueError):
            PassiveTransform(noisy)
        assert PassiveTransform(noisy, tol=1e-6).modes == 1


class TestUnitaryRoundTrip:
    """Complex unitary <-> real passive correspondence"""

    def test_phase_is_rotation(self):
        z = unitary_to_passive(np.array([[np.exp(0.3j)]]))
        expected = np.array([[np.cos(0.3), np.sin(0.3)], [-np.sin(0.3), np.cos(0.3)]])
        assert np.allclose(z.matrix, expected, atol=1e-15, rtol=0)

    def test_round_trip(self):
        for modes in (1, 2, 4):
            u = passive_to_unitary(random_passive(modes, seed=modes))
            z = unitary_to_passive(u)
            assert np.allclose(passive_to_unitary(z), u, atol=1e-12, rtol=0)

    def test_homomorphism(self):
        """Products of unitaries map to products of passive matrices"""
        rng = np.random.default_rng(11)
        u = passive_to_unitary(random_passive(3, rng))
        v = passive_to_unitary(random_passive(3, rng))
        lhs = unitary_to_passive(u @ v).matrix
        rhs = unitary_to_passive(u).matrix @ unitary_to_passive(v).matrix
        assert np.allclose(lhs, rhs, atol=1e-13, rtol=0)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError, match="not passive"):
            unitary_to_passive(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestRandomPassive:
    """Haar sampler determinism and distribution"""

    def test_same_seed_bit_identical(self):
        a = random_passive(3, seed=42)
        b = random_passive(3, seed=42)
        assert np.array_equal(a.matrix, b.matrix)

    def test_different_seeds_differ(self):
        assert not np.allclose(
            random_passive(3, seed=0).matrix, random_passive(3, seed=1).matrix
        )

    def test_generator_passthrough(self):
        """A Generator argument advances state instead of reseeding"""
        rng = np.random.default_rng(7)
        a = random_passive(2, rng)
        b = random_passive(2, rng)
        assert not np.allclose(a.matrix, b.matrix)
        assert np.array_equal(a.matrix, random_passive(2, np.random.default_rng(7)).matrix)

    def test_invariants_battery(self):
        """Orthogonality, symplecticity, submatrix structure, epsilon equality"""
        rng = np.random.default_rng(5)
        for _ in range(200):
            modes = int(rng.integers(1, 5))
            z = random_passive(modes, rng)
            m = z.matrix
            assert np.abs(m @ m.T - np.eye(2 * modes)).max() < 1e-12
            om = omega(modes)
            assert np.abs(m @ om @ m.T - om).max() < 1e-12
            assert submatrix_asymmetry(z) < 1e-12
            # x-diagonal and p-diagonal sums agree for passive blocks
            assert abs(m[0::2, 0::2].sum() - m[1::2, 1::2].sum()) < 1e-12

    def test_single_mode_angle_distribution(self):
        """Rotation angles of 1-mode samples are uniform on (-pi, pi]"""
        rng = np.random.default_rng(123)
        angles = np.array(
            [np.arctan2(random_passive(1, rng).matrix[0, 1], random_passive(1, rng).matrix[0, 0])
             for _ in range(2000)]
        )
        result = stats.kstest(angles, stats.uniform(loc=-np.pi, scale=2 * np.pi).cdf)
        assert result.pvalue > 1e-3


class TestBeamSplitter:
    """Two-mode beam splitter construction"""

    def test_full_transmission_is_identity(self):
        assert np.allclose(beam_splitter(1.0).matrix, np.eye(4), atol=1e-15, rtol=0)

    def test_full_reflection_swaps_modes(self):
        z = beam_splitter(0.0).matrix
        eye = np.eye(2)
        expected = np.block([[0 * eye, eye], [-eye, 0 * eye]])
        assert np.allclose(z, expected, atol=1e-15, rtol=0)

    def test_balanced_blocks(self):
        z = beam_splitter(0.5).matrix
        c = np.sqrt(0.5)
        assert np.allclose(z[:2, :2], c * np.eye(2), atol=1e-15, rtol=0)
        assert np.allclose(z[:2, 2:], c * np.eye(2), atol=1e-15, rtol=0)
        assert np.allclose(z[2:, :2], -c * np.eye(2), atol=1e-15, rtol=0)

    def test_is_passive_for_all_eta(self):
        for eta in (0.0, 0.3, 0.999, 1.0):
            assert is_passive(beam_splitter(eta).matrix, 1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            beam_splitter(1.5)


class TestBlockDecompose:
    """Port-block splitting of an interferometer"""

    def test_shapes_and_reassembly(self):
        z = random_passive(3, seed=9)
        e, f, g, h = block_decompose(z, m=2, l=1)
        assert e.shape == (4, 2) and f.shape == (4, 4)
        assert g.shape == (2, 2) and h.shape == (2, 4)
        assert np.array_equal(np.block([[e, f], [g, h]]), z.matrix)

    def test_block_row_identities(self):
        """EE^T + FF^T = 1 and E Omega E^T + F Omega F^T = Omega on the kept rows"""
        rng = np.random.default_rng(17)
        for _ in range(50):
            k = int(rng.integers(2, 5))
            m = int(rng.integers(1, k + 1))
            l = int(rng.integers(1, k))
            e, f, _, _ = block_decompose(random_passive(k, rng), m=m, l=l)
            assert np.abs(e @ e.T + f @ f.T - np.eye(2 * m)).max() < 1e-12
            lhs = e @ omega(l) @ e.T + f @ omega(k - l) @ f.T
            assert np.abs(lhs - omega(m)).max() < 1e-12

    def test_out_of_range_split_rejected(self):
        z = random_passive(2, seed=0)
        with pytest.raises(ValueError, match="row split"):
            block_decompose(z, m=3, l=1)
        with pytest.raises(ValueError, match="column split"):
            block_decompose(z, m=1, l=3)


class TestEpsilonSum:
    """Scalar extracted from the fed-back block"""

    def test_beam_splitter_value(self):
        e, _, _, _ = block_decompose(beam_splitter(0.49), m=1, l=1)
        assert epsilon_sum(e) == pytest.approx(0.7, abs=1e-15)

    def test_identity_counts_modes(self):
        assert epsilon_sum(np.eye(6)) == 3.0

    def test_odd_shape_rejected(self):
        with pytest.raises(ValueError, match="even"):
            epsilon_sum(np.zeros((3, 2)))


class TestCompletePassive:
    """Haar completion of a partial interferometer"""

    def test_top_rows_preserved(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            k = int(rng.integers(2, 5))
            m = int(rng.integers(1, k))
            l = int(rng.integers(1, k))
            e, f, _, _ = block_decompose(random_passive(k, rng), m=m, l=l)
            full = complete_passive(e, f, seed=3)
            assert np.abs(full.matrix[: 2 * m] - np.hstack([e, f])).max() < 1e-12
            assert full.modes == k

    def test_distinct_seeds_distinct_bottoms(self):
        e, f, _, _ = block_decompose(random_passive(3, seed=4), m=1, l=2)
        a = complete_passive(e, f, seed=0).matrix
        b = complete_passive(e, f, seed=1).matrix
        assert np.abs(a[:2] - b[:2]).max() < 1e-12
        assert np.abs(a[2:] - b[2:]).max() > 1e-3

    def test_full_rows_need_no_completion(self):
        z = random_passive(2, seed=8)
        e, f, _, _ = block_decompose(z, m=2, l=1)
        assert np.allclose(complete_passive(e, f).matrix, z.matrix, atol=1e-12, rtol=0)

    def test_non_orthonormal_rows_rejected(self):
        with pytest.raises(ValueError, match="not a passive block row"):
            complete_passive(0.5 * np.eye(2), np.zeros((2, 2)))

    def test_structureless_rows_rejected(self):
        bad = np.array([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="submatrices"):
            complete_passive(bad, np.zeros((2, 2)))
