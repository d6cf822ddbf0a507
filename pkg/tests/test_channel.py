import json

import numpy as np
import pytest

from pinchlab.channel import (
    ChannelSpec,
    apply_channel,
    choi_matrix,
    compression_mixture_channel,
    geometric_weights,
    pinching_channel,
    verify_channel,
)
from pinchlab.errors import (
    FormatError,
    TargetMismatchError,
    WeightsNotNormalizedError,
)
from pinchlab.expectation import (
    MasaPartition,
    conditional_expectation,
    parse_blocks,
    singleton_masa,
)
from pinchlab.linalg import operator_norm
from pinchlab.pinching import realize_diagonal, realize_normal_blocks


def shared_target_plans():
    values = np.array([0.5, -0.5j, 0.3 + 0.2j])
    plans = [
        realize_diagonal(values),
        realize_normal_blocks([np.diag(values)]),
        realize_normal_blocks([np.diag(values[:1]), np.diag(values[1:])]),
    ]
    return values, plans


def choi_by_definition(spec):
    # independent oracle: assemble sum_ij E_ij (x) Phi(E_ij) literally
    n, m = spec.input_dim, spec.output_dim
    out = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[i, j] = 1.0
            out += np.kron(unit, apply_channel(spec, unit))
    return out


class TestPinchingChannel:
    def test_matches_conditional_expectation(self):
        rng = np.random.default_rng(1)
        masa = parse_blocks("1,3;2;4", 4)
        spec = pinching_channel(masa)
        for _ in range(20):
            z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            np.testing.assert_array_equal(
                apply_channel(spec, z), conditional_expectation(z, masa)
            )

    def test_dephasing_choi_spectrum(self):
        choi = choi_matrix(pinching_channel(singleton_masa(2)))
        np.testing.assert_allclose(
            np.linalg.eigvalsh(choi.matrix), [0, 0, 1, 1], atol=1e-12
        )
        assert choi.min_eigenvalue >= -1e-12

    def test_trivial_masa_identity_channel(self):
        masa = MasaPartition(dim=3, blocks=((0, 1, 2),))
        choi = choi_matrix(pinching_channel(masa))
        eigs = np.linalg.eigvalsh(choi.matrix)
        np.testing.assert_allclose(eigs[:-1], 0.0, atol=1e-12)
        assert abs(eigs[-1] - 3.0) <= 1e-12  # maximally entangled, rank one

    def test_verifies_green(self):
        report = verify_channel(pinching_channel(parse_blocks("1,2;3")), 25)
        assert report.unital and report.trace_preserving
        assert report.choi_min_eigenvalue >= -1e-9
        assert report.positive_on_samples and report.declared_ok


class TestWeights:
    def test_ladder(self):
        assert geometric_weights(1) == (1.0,)
        assert geometric_weights(3) == (0.5, 0.25, 0.25)

    @pytest.mark.parametrize("count", range(1, 9))
    def test_sums_to_one(self, count):
        assert sum(geometric_weights(count)) == 1.0

    def test_count_validated(self):
        with pytest.raises(FormatError):
            geometric_weights(0)


class TestCompressionMixture:
    def test_single_plan_reproduces_target(self):
        values = np.array([0.5, -0.5j])
        plan = realize_diagonal(values)
        spec = compression_mixture_channel([plan], [1.0])
        out = apply_channel(spec, plan.ambient())
        assert operator_norm(out - np.diag(values)) <= 1e-10

    def test_unital(self):
        _, plans = shared_target_plans()
        spec = compression_mixture_channel(plans, geometric_weights(3))
        out = apply_channel(spec, np.eye(spec.input_dim, dtype=complex))
        assert operator_norm(out - np.eye(spec.output_dim)) <= 1e-10

    def test_ladder_mixture_reproduces_target(self):
        values, plans = shared_target_plans()
        spec = compression_mixture_channel(plans, geometric_weights(3))
        out = apply_channel(spec, plans[0].ambient())
        assert operator_norm(out - np.diag(values)) <= 1e-10

    def test_verify_expected_trace_failure(self):
        _, plans = shared_target_plans()
        spec = compression_mixture_channel(plans, geometric_weights(3))
        report = verify_channel(spec, 25)
        assert report.unital
        assert report.choi_min_eigenvalue >= -1e-9
        assert report.declared_ok  # trace preservation is not declared here
        assert not report.trace_preserving
        assert report.trace_witness["type"] == "matrix_unit"
        assert report.trace_witness["violation"] > 0.1

    def test_rejects_bad_weights(self):
        _, plans = shared_target_plans()
        with pytest.raises(WeightsNotNormalizedError):
            compression_mixture_channel(plans, (0.5, 0.25))
        with pytest.raises(WeightsNotNormalizedError):
            compression_mixture_channel(plans, (0.5, 0.3, 0.3))
        with pytest.raises(WeightsNotNormalizedError):
            compression_mixture_channel(plans, (1.5, -0.25, -0.25))

    def test_rejects_target_mismatch(self):
        plan1 = realize_diagonal([0.5, 0.2])
        plan2 = realize_diagonal([0.5, -0.2])
        with pytest.raises(TargetMismatchError):
            compression_mixture_channel([plan1, plan2], (0.5, 0.5))


class TestChoi:
    @pytest.mark.parametrize("blocks", ["1;2", "1,2;3", "1,2,3"])
    def test_matches_literal_definition_pinching(self, blocks):
        spec = pinching_channel(parse_blocks(blocks))
        np.testing.assert_allclose(
            choi_matrix(spec).matrix, choi_by_definition(spec), atol=1e-12
        )

    def test_matches_literal_definition_mixture(self):
        _, plans = shared_target_plans()
        spec = compression_mixture_channel(plans, geometric_weights(3))
        np.testing.assert_allclose(
            choi_matrix(spec).matrix, choi_by_definition(spec), atol=1e-12
        )

    def test_psd_choi_implies_sampled_complete_positivity(self):
        rng = np.random.default_rng(77)
        specs = [
            pinching_channel(parse_blocks("1,2;3,4")),
            compression_mixture_channel(
                [realize_diagonal([0.3, -0.4j])], [1.0]
            ),
        ]
        for spec in specs:
            assert choi_matrix(spec).min_eigenvalue >= -1e-9
            n = spec.input_dim
            ref = min(n, 4)
            for _ in range(10):
                g = rng.normal(size=(n * ref, n * ref)) + 1j * rng.normal(
                    size=(n * ref, n * ref)
                )
                psd = g @ g.conj().T
                psd /= operator_norm(psd)
                doubled = np.zeros(
                    (spec.output_dim * ref, spec.output_dim * ref), dtype=complex
                )
                for w, m in spec.factors:
                    lifted = np.kron(m, np.eye(ref))
                    doubled += w * (lifted @ psd @ lifted.conj().T)
                assert np.linalg.eigvalsh((doubled + doubled.conj().T) / 2)[0] >= -1e-8


def test_channel_json_round_trip():
    spec = pinching_channel(parse_blocks("1;2,3"))
    again = ChannelSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again.kind == spec.kind
    assert again.input_dim == spec.input_dim and again.output_dim == spec.output_dim
    for (w1, m1), (w2, m2) in zip(spec.factors, again.factors):
        assert w1 == w2
        assert np.array_equal(m1, m2)
