import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchlab.errors import FormatError, NotHermitianError, NotOrthonormalError
from pinchlab.linalg import (
    complete_orthonormal,
    haar_unitary,
    hermitian_eig,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    pos_neg_parts,
    svd,
)

THREE_CYCLE = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


class TestHermitianEig:
    def test_identity(self):
        spec = hermitian_eig(np.eye(3, dtype=complex))
        np.testing.assert_allclose(spec.eigenvalues, [1, 1, 1])

    def test_three_cycle_hermitian_part(self):
        # circulant: eigenvalues cos(2 pi k / 3) = 1, -1/2, -1/2
        spec = hermitian_eig((THREE_CYCLE + THREE_CYCLE.conj().T) / 2)
        np.testing.assert_allclose(spec.eigenvalues, [-0.5, -0.5, 1.0], atol=1e-12)

    def test_two_by_two(self):
        spec = hermitian_eig(np.array([[2, 1], [1, 0]], dtype=complex))
        np.testing.assert_allclose(
            spec.eigenvalues, [1 - np.sqrt(2), 1 + np.sqrt(2)], atol=1e-12
        )

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_reconstruction_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            h = random_hermitian(rng, int(rng.integers(1, 17)))
            spec = hermitian_eig(h)
            scale = max(operator_norm(h), 1e-30)
            assert operator_norm(spec.reconstruct() - h) <= 1e-10 * scale
            v = spec.eigenvectors
            assert operator_norm(v.conj().T @ v - np.eye(h.shape[0])) <= 1e-10
            assert np.all(np.diff(spec.eigenvalues) >= -1e-14)

    def test_empty(self):
        spec = hermitian_eig(np.zeros((0, 0)))
        assert spec.eigenvalues.shape == (0,)
        assert spec.eigenvectors.shape == (0, 0)


class TestSvd:
    def test_oblique_projection_singular_values(self):
        a = 1.7
        _, s, _ = svd(np.array([[1, 0], [a, 0]], dtype=complex))
        np.testing.assert_allclose(s, [np.sqrt(1 + a * a), 0.0], atol=1e-12)

    def test_zero_matrix(self):
        _, s, _ = svd(np.zeros((3, 3)))
        np.testing.assert_allclose(s, 0.0)

    @pytest.mark.parametrize(
        "a,expected",
        [
            (np.sqrt(4 + 2 * np.sqrt(5)), np.sqrt(5 + 2 * np.sqrt(5))),
            (np.sqrt(8.0), 3.0),
        ],
    )
    def test_norm_formula(self, a, expected):
        # ||[[1,0],[a,0]]|| = sqrt(1 + a^2)
        m = np.array([[1, 0], [a, 0]], dtype=complex)
        assert abs(operator_norm(m) - expected) <= 1e-12

    def test_reconstruction_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m = rng.normal(size=(int(rng.integers(1, 9)), int(rng.integers(1, 9))))
            m = m + 1j * rng.normal(size=m.shape)
            u, s, v = svd(m)
            scale = max(operator_norm(m), 1e-30)
            smat = np.zeros(m.shape)
            np.fill_diagonal(smat, s)
            assert operator_norm(u @ smat @ v.conj().T - m) <= 1e-10 * scale
            top = np.sqrt(np.linalg.eigvalsh(m.conj().T @ m)[-1])
            assert abs(s[0] - top) <= 1e-10 * scale

    def test_empty(self):
        u, s, v = svd(np.zeros((0, 0)))
        assert s.shape == (0,)


class TestPosNegParts:
    def test_diagonal(self):
        plus, minus = pos_neg_parts(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(plus, np.diag([2.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(minus, np.diag([0.0, 1.0]), atol=1e-12)

    def test_psd_input(self):
        h = np.array([[2, 1], [1, 2]], dtype=complex)
        plus, minus = pos_neg_parts(h)
        np.testing.assert_allclose(plus, h, atol=1e-12)
        np.testing.assert_allclose(minus, 0.0, atol=1e-12)

    def test_indefinite_norms(self):
        plus, minus = pos_neg_parts(np.array([[2, 1], [1, 0]], dtype=complex))
        assert abs(operator_norm(plus) - (1 + np.sqrt(2))) <= 1e-12
        assert abs(operator_norm(minus) - (np.sqrt(2) - 1)) <= 1e-12

    def test_properties_random(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            h = random_hermitian(rng, int(rng.integers(1, 13)))
            plus, minus = pos_neg_parts(h)
            scale = max(operator_norm(h), 1e-30)
            assert operator_norm(plus - minus - h) <= 1e-10 * scale
            assert np.linalg.eigvalsh(plus)[0] >= -1e-10 * scale
            assert np.linalg.eigvalsh(minus)[0] >= -1e-10 * scale
            assert operator_norm(plus @ minus) <= 1e-9 * scale * scale


class TestCompleteOrthonormal:
    def test_first_basis_vector(self):
        u = complete_orthonormal([np.array([1.0, 0.0])], 2)
        np.testing.assert_allclose(u[:, 0], [1, 0])
        assert operator_norm(u.conj().T @ u - np.eye(2)) <= 1e-12

    def test_empty_gives_identity(self):
        np.testing.assert_array_equal(complete_orthonormal([], 4), np.eye(4))

    def test_hadamard_direction(self):
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        u = complete_orthonormal([v], 2)
        np.testing.assert_allclose(u[:, 0], v)
        assert operator_norm(u.conj().T @ u - np.eye(2)) <= 1e-12

    def test_random_partial_frames(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            dim = int(rng.integers(1, 10))
            k = int(rng.integers(0, dim + 1))
            frame = haar_unitary(dim, rng)[:, :k]
            u = complete_orthonormal(list(frame.T), dim)
            np.testing.assert_allclose(u[:, :k], frame, atol=1e-12)
            assert operator_norm(u.conj().T @ u - np.eye(dim)) <= 1e-10

    def test_rejects_non_orthonormal(self):
        with pytest.raises(NotOrthonormalError):
            complete_orthonormal([np.array([1.0, 1.0])], 2)

    def test_rejects_overfull(self):
        with pytest.raises(NotOrthonormalError):
            complete_orthonormal([np.array([1.0, 0.0]), np.array([1.0, 0.0])], 2)


class TestMatrixJson:
    def test_examples_round_trip(self):
        m = np.array([[1 + 2j, 0.1], [-3.5j, 7]], dtype=complex)
        again = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
        assert np.array_equal(m, again)

    def test_empty_round_trip(self):
        m = np.zeros((0, 0), dtype=complex)
        assert matrix_from_json(matrix_to_json(m)).shape == (0, 0)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.floats(allow_nan=False, allow_infinity=False),
                st.floats(allow_nan=False, allow_infinity=False),
            ),
            min_size=1,
            max_size=12,
        )
    )
    def test_bit_exact_round_trip(self, pairs):
        m = np.array([complex(re, im) for re, im in pairs]).reshape(1, -1)
        again = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
        assert np.array_equal(m, again)

    def test_rejects_bad_length(self):
        with pytest.raises(FormatError):
            matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})

    def test_rejects_non_finite(self):
        with pytest.raises(FormatError):
            matrix_from_json({"rows": 1, "cols": 1, "data": [[float("nan"), 0]]})

    def test_rejects_bad_pair(self):
        with pytest.raises(FormatError):
            matrix_from_json({"rows": 1, "cols": 1, "data": [[1, 2, 3]]})


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(19)
    for dim in (1, 2, 5, 9):
        u = haar_unitary(dim, rng)
        assert operator_norm(u.conj().T @ u - np.eye(dim)) <= 1e-12
