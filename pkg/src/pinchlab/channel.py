"""Positive linear maps built from pinching data, with Choi-matrix
certificates of complete positivity and explicit unitality / trace checks.

Two kinds are modeled: the block pinching itself (projection factors, both
unital and trace preserving) and convex mixtures of co-isometric
compressions taken from pinching plans (unital and completely positive;
trace preservation genuinely fails at finite size, and the verifier records
a matrix-unit witness of the failure).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    FormatError,
    TargetMismatchError,
    WeightsNotNormalizedError,
)
from .expectation import MasaPartition
from .linalg import as_matrix, matrix_from_json, matrix_to_json, operator_norm, require_square
from .pinching import PinchingPlan

KIND_PINCHING = "pinching"
KIND_MIXTURE = "compression_mixture"


@dataclass(frozen=True)
class ChannelSpec:
    """Positive linear map Z -> sum_i w_i M_i Z M_i* with positive weights."""

    input_dim: int
    output_dim: int
    factors: tuple[tuple[float, np.ndarray], ...]
    kind: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "factors": [
                {"weight": w, "matrix": matrix_to_json(m)} for w, m in self.factors
            ],
        }

    @staticmethod
    def from_json(obj) -> "ChannelSpec":
        try:
            factors = tuple(
                (float(f["weight"]), matrix_from_json(f["matrix"]))
                for f in obj["factors"]
            )
            return ChannelSpec(
                input_dim=int(obj["input_dim"]),
                output_dim=int(obj["output_dim"]),
                factors=factors,
                kind=str(obj["kind"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed channel JSON: {exc}") from exc


def apply_channel(spec: ChannelSpec, z) -> np.ndarray:
    z = require_square(as_matrix(z))
    if z.shape[0] != spec.input_dim:
        raise DimensionMismatchError(
            f"input dim {z.shape[0]} != channel input dim {spec.input_dim}"
        )
    out = np.zeros((spec.output_dim, spec.output_dim), dtype=complex)
    for weight, m in spec.factors:
        out += weight * (m @ z @ m.conj().T)
    return out


def pinching_channel(masa: MasaPartition) -> ChannelSpec:
    """The conditional expectation as a channel: projection factors, weight 1.

    Unital and trace preserving by construction (the projections sum to the
    identity on both sides).
    """
    factors = tuple((1.0, p) for p in masa.projections())
    return ChannelSpec(
        input_dim=masa.dim, output_dim=masa.dim, factors=factors, kind=KIND_PINCHING
    )


def geometric_weights(count: int) -> tuple[float, ...]:
    """Halving weights 2^-1, ..., 2^-(count-1) with the last one doubled to sum to 1."""
    if count < 1:
        raise FormatError(f"count must be >= 1, got {count}")
    if count == 1:
        return (1.0,)
    ladder = [2.0**-i for i in range(1, count)]
    return tuple(ladder + [ladder[-1]])


def compression_mixture_channel(
    plans: list[PinchingPlan], weights
) -> ChannelSpec:
    """Convex mixture of the prescribed-block compressions of several plans.

    Each plan contributes the co-isometry formed by the prescribed rows of
    its unitary, so the mixture is unital; when all plans share one ambient
    operator A and target X, the mixture maps A to X.
    """
    if not plans:
        raise FormatError("at least one plan is required")
    weights = [float(w) for w in weights]
    if len(weights) != len(plans):
        raise WeightsNotNormalizedError(
            f"{len(weights)} weights for {len(plans)} plans"
        )
    if any(w <= 0 for w in weights):
        raise WeightsNotNormalizedError("weights must be positive")
    if abs(sum(weights) - 1.0) > 1e-10:
        raise WeightsNotNormalizedError(f"weights sum to {sum(weights)}, expected 1")

    out_dim = len(plans[0].prescribed_positions)
    in_dim = plans[0].ambient_dim
    target = plans[0].target()
    for plan in plans[1:]:
        if plan.ambient_dim != in_dim or len(plan.prescribed_positions) != out_dim:
            raise TargetMismatchError("plans disagree on ambient or target dimension")
        if operator_norm(plan.target() - target) > 1e-8 * (
            1.0 + operator_norm(target)
        ):
            raise TargetMismatchError("plans disagree on the realized target")

    factors = tuple(
        (w, plan.unitary[:out_dim, :]) for w, plan in zip(weights, plans)
    )
    return ChannelSpec(
        input_dim=in_dim, output_dim=out_dim, factors=factors, kind=KIND_MIXTURE
    )


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi certificate sum_ij E_ij (x) Phi(E_ij); PSD iff Phi is completely positive."""

    matrix: np.ndarray
    min_eigenvalue: float


def choi_matrix(spec: ChannelSpec) -> ChoiMatrix:
    dim = spec.input_dim * spec.output_dim
    choi = np.zeros((dim, dim), dtype=complex)
    for weight, m in spec.factors:
        vec = m.T.reshape(-1)
        choi += weight * np.outer(vec, vec.conj())
    min_eig = float(np.linalg.eigvalsh(choi)[0]) if dim else 0.0
    return ChoiMatrix(matrix=choi, min_eigenvalue=min_eig)


@dataclass(frozen=True)
class ChannelReport:
    """Verification outcome for one channel."""

    kind: str
    unital: bool
    unital_error: float
    trace_preserving: bool
    trace_worst_violation: float
    trace_witness: dict | None
    choi_min_eigenvalue: float
    positive_on_samples: bool
    min_output_eigenvalue: float
    declared_ok: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "unital": self.unital,
            "unital_error": self.unital_error,
            "trace_preserving": self.trace_preserving,
            "trace_worst_violation": self.trace_worst_violation,
            "trace_witness": self.trace_witness,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "positive_on_samples": self.positive_on_samples,
            "min_output_eigenvalue": self.min_output_eigenvalue,
            "declared_ok": self.declared_ok,
        }


def verify_channel(
    spec: ChannelSpec, trials: int, rng: np.random.Generator | None = None
) -> ChannelReport:
    """Check unitality, trace preservation, complete positivity, positivity.

    Trace preservation is probed on every matrix unit (adversarial: random
    inputs can mask block-asymmetric violations) plus ``trials`` random
    matrices; the worst violation and its witness are recorded.  Complete
    positivity is certified by the least Choi eigenvalue; positivity is
    sampled on random PSD inputs.
    """
    if trials < 1:
        raise FormatError(f"trials must be >= 1, got {trials}")
    rng = rng if rng is not None else np.random.default_rng(0)
    n = spec.input_dim

    unital_error = operator_norm(
        apply_channel(spec, np.eye(n, dtype=complex)) - np.eye(spec.output_dim)
    )
    unital = unital_error <= 1e-10

    unit_worst, unit_witness = 0.0, None
    for r in range(n):
        for c in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[r, c] = 1.0
            viol = abs(np.trace(apply_channel(spec, unit)) - (1.0 if r == c else 0.0))
            if viol > unit_worst:
                unit_worst = viol
                unit_witness = {
                    "type": "matrix_unit",
                    "row": r + 1,
                    "col": c + 1,
                    "violation": float(viol),
                }
    worst, witness = unit_worst, unit_witness
    for i in range(trials):
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        viol = abs(np.trace(apply_channel(spec, z)) - np.trace(z))
        if viol > worst:
            worst = viol
            witness = {"type": "random", "index": i, "violation": float(viol)}
    trace_preserving = worst <= 1e-9
    if unit_worst > 1e-9:
        witness = unit_witness  # a structured witness beats a random one

    choi = choi_matrix(spec)

    min_out = np.inf
    for _ in range(trials):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        psd = g @ g.conj().T
        psd /= max(operator_norm(psd), 1.0)
        out = apply_channel(spec, psd)
        min_out = min(min_out, float(np.linalg.eigvalsh((out + out.conj().T) / 2)[0]))
    positive_on_samples = min_out >= -1e-8

    completely_positive = choi.min_eigenvalue >= -1e-9
    if spec.kind == KIND_PINCHING:
        declared_ok = unital and trace_preserving and completely_positive and positive_on_samples
    else:
        declared_ok = unital and completely_positive and positive_on_samples

    return ChannelReport(
        kind=spec.kind,
        unital=bool(unital),
        unital_error=float(unital_error),
        trace_preserving=bool(trace_preserving),
        trace_worst_violation=float(worst),
        trace_witness=None if trace_preserving else witness,
        choi_min_eigenvalue=choi.min_eigenvalue,
        positive_on_samples=bool(positive_on_samples),
        min_output_eigenvalue=float(min_out),
        declared_ok=bool(declared_ok),
    )
