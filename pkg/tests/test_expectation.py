import numpy as np
import pytest

from pinchlab.errors import DimensionMismatchError, FormatError
from pinchlab.expectation import (
    MasaPartition,
    check_reduction,
    conditional_expectation,
    parse_blocks,
    singleton_masa,
)
from pinchlab.linalg import haar_unitary, operator_norm


def random_matrix(rng, dim):
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


class TestPartition:
    def test_projections_sum_to_identity(self):
        masa = MasaPartition(dim=4, blocks=((0, 2), (1,), (3,)))
        total = sum(masa.projections())
        np.testing.assert_array_equal(total, np.eye(4))

    def test_rejects_overlap(self):
        with pytest.raises(FormatError):
            MasaPartition(dim=3, blocks=((0, 1), (1, 2)))

    def test_rejects_gap(self):
        with pytest.raises(FormatError):
            MasaPartition(dim=3, blocks=((0, 1),))

    def test_rejects_empty_block(self):
        with pytest.raises(FormatError):
            MasaPartition(dim=2, blocks=((0, 1), ()))

    def test_rejects_label_mismatch(self):
        with pytest.raises(FormatError):
            MasaPartition(dim=2, blocks=((0,), (1,)), labels=("only-one",))

    def test_json_round_trip(self):
        masa = MasaPartition(
            dim=4, blocks=((1, 3), (0,), (2,)), labels=("a", "b", "c")
        )
        again = MasaPartition.from_json(masa.to_json())
        assert again == masa

    def test_parse_blocks_grammar(self):
        masa = parse_blocks("1;2;3,4")
        assert masa.dim == 4
        assert masa.blocks == ((0,), (1,), (2, 3))

    def test_parse_blocks_bad_input(self):
        with pytest.raises(FormatError):
            parse_blocks("1;;2")
        with pytest.raises(FormatError):
            parse_blocks("1;x")


class TestConditionalExpectation:
    def test_diagonal_extraction(self):
        z = np.array([[1, 2], [3, 4]], dtype=complex)
        np.testing.assert_array_equal(
            conditional_expectation(z, singleton_masa(2)), np.diag([1.0, 4.0])
        )

    def test_block_diagonal_fixed_point(self):
        masa = parse_blocks("1,2;3", 3)
        z = np.array([[1, 2, 0], [3, 4, 0], [0, 0, 5]], dtype=complex)
        np.testing.assert_array_equal(conditional_expectation(z, masa), z)

    def test_trivial_masa_is_identity_map(self):
        z = np.array([[1, 2], [3, 4]], dtype=complex)
        masa = MasaPartition(dim=2, blocks=((0, 1),))
        np.testing.assert_array_equal(conditional_expectation(z, masa), z)

    def test_dimension_checked(self):
        with pytest.raises(DimensionMismatchError):
            conditional_expectation(np.eye(3), singleton_masa(2))

    def test_idempotent_as_a_map(self):
        rng = np.random.default_rng(3)
        masa = parse_blocks("1,4;2;3,5", 5)
        z = random_matrix(rng, 5)
        once = conditional_expectation(z, masa)
        np.testing.assert_array_equal(conditional_expectation(once, masa), once)

    def test_matches_projection_sum(self):
        rng = np.random.default_rng(14)
        masa = parse_blocks("1,3;2,4", 4)
        z = random_matrix(rng, 4)
        via_projections = sum(p @ z @ p for p in masa.projections())
        np.testing.assert_allclose(
            conditional_expectation(z, masa), via_projections, atol=1e-14
        )


def _random_partition(rng, dim):
    order = [int(i) for i in rng.permutation(dim)]
    blocks, pos = [], 0
    while pos < dim:
        size = int(rng.integers(1, dim - pos + 1))
        blocks.append(tuple(order[pos : pos + size]))
        pos += size
    return MasaPartition(dim=dim, blocks=tuple(blocks))


class TestMapProperties:
    def test_unital_positive_trace_module(self):
        rng = np.random.default_rng(40)
        for _ in range(200):
            dim = int(rng.integers(1, 9))
            masa = _random_partition(rng, dim)
            z = random_matrix(rng, dim)
            w = random_matrix(rng, dim)

            # linearity
            lhs = conditional_expectation(1.3 * z - 0.7j * w, masa)
            rhs = 1.3 * conditional_expectation(z, masa) - 0.7j * conditional_expectation(w, masa)
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

            # unitality
            np.testing.assert_array_equal(
                conditional_expectation(np.eye(dim, dtype=complex), masa), np.eye(dim)
            )

            # positivity
            psd = z @ z.conj().T
            out = conditional_expectation(psd, masa)
            assert np.linalg.eigvalsh((out + out.conj().T) / 2)[0] >= -1e-10 * max(
                operator_norm(psd), 1.0
            )

            # trace preservation
            assert abs(np.trace(conditional_expectation(z, masa)) - np.trace(z)) <= (
                1e-10 * max(operator_norm(z), 1.0) * dim
            )

            # module property over block-diagonal multipliers
            d = conditional_expectation(w, masa)
            np.testing.assert_allclose(
                conditional_expectation(d @ z, masa),
                d @ conditional_expectation(z, masa),
                atol=1e-12,
            )


class TestReduction:
    def test_hermitian_diagonal_in_spectral_interval(self):
        rng = np.random.default_rng(6)
        g = random_matrix(rng, 5)
        h = (g + g.conj().T) / 2
        report = check_reduction(h, singleton_masa(5), 64, rng=rng)
        assert report.passed
        lo, hi = np.linalg.eigvalsh(h)[[0, -1]]
        assert np.all(np.real(np.diag(h)) >= lo - 1e-10)
        assert np.all(np.real(np.diag(h)) <= hi + 1e-10)

    def test_normal_input(self):
        rng = np.random.default_rng(7)
        u = haar_unitary(4, rng)
        z = u @ np.diag(rng.normal(size=4) + 1j * rng.normal(size=4)) @ u.conj().T
        report = check_reduction(z, parse_blocks("1,2;3,4", 4), 64, rng=rng)
        assert report.passed

    def test_fixed_point_trivially_passes(self):
        rng = np.random.default_rng(8)
        masa = parse_blocks("1;2;3", 3)
        z = np.diag(rng.normal(size=3)).astype(complex)
        report = check_reduction(z, masa, 16, rng=rng)
        assert report.passed and report.witness is None

    def test_samples_validated(self):
        with pytest.raises(FormatError):
            check_reduction(np.eye(2), singleton_masa(2), 0)
