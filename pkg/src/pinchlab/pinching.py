"""Constructive realizations of prescribed diagonals and normal blocks as
pinchings of a stack of oblique projections, plus the two-unitary averaging
identity, the coordinate-alignment approximation step, and the spectral
obstruction distance between Hermitian unitary orbits.

A finite stack of n copies of [[1,0],[a,0]] (dimension 2n) can carry any n
strictly contractive values on half its coordinates; the other half is
forced by the per-block traces and is returned explicitly rather than
hidden.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    FormatError,
    NotNormalError,
    ValueOutOfDiscError,
)
from .expectation import MasaPartition, conditional_expectation
from .idempotent import oblique_projection
from .linalg import (
    as_matrix,
    check_hermitian,
    complete_orthonormal,
    frobenius,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    require_square,
)
from .numrange import OperatorModel, block_diag, optimal_disc_parameter, range_witness


@dataclass(frozen=True)
class PinchingPlan:
    """A unitary U together with the pinching data it realizes.

    ``realized`` is the block-diagonal pinching of U A U* with respect to
    ``partition``, where A is the ``copies``-fold truncation of ``source``.
    The prescribed coordinates sit first; the complementary blocks carry the
    forced compressions.
    """

    ambient_dim: int
    unitary: np.ndarray
    partition: MasaPartition
    source: OperatorModel
    copies: int
    prescribed_positions: tuple[int, ...]
    realized: np.ndarray

    def ambient(self) -> np.ndarray:
        return self.source.truncation(self.copies)

    def conjugated(self) -> np.ndarray:
        return self.unitary @ self.ambient() @ self.unitary.conj().T

    def target(self) -> np.ndarray:
        """Compression of U A U* onto the prescribed coordinates."""
        idx = np.asarray(self.prescribed_positions, dtype=int)
        return self.realized[np.ix_(idx, idx)]

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "unitary": matrix_to_json(self.unitary),
            "partition": self.partition.to_json(),
            "source": {
                "exceptional": matrix_to_json(self.source.exceptional),
                "repeated": matrix_to_json(self.source.repeated),
                "scale": [
                    float(complex(self.source.scale).real),
                    float(complex(self.source.scale).imag),
                ],
                "copies": self.copies,
            },
            "prescribed_positions": [p + 1 for p in self.prescribed_positions],
            "realized": matrix_to_json(self.realized),
        }

    @staticmethod
    def from_json(obj) -> "PinchingPlan":
        try:
            src = obj["source"]
            source = OperatorModel(
                exceptional=matrix_from_json(src["exceptional"]),
                repeated=matrix_from_json(src["repeated"]),
                scale=complex(src["scale"][0], src["scale"][1]),
            )
            return PinchingPlan(
                ambient_dim=int(obj["ambient_dim"]),
                unitary=matrix_from_json(obj["unitary"]),
                partition=MasaPartition.from_json(obj["partition"]),
                source=source,
                copies=int(src["copies"]),
                prescribed_positions=tuple(
                    int(p) - 1 for p in obj["prescribed_positions"]
                ),
                realized=matrix_from_json(obj["realized"]),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"malformed plan JSON: {exc}") from exc


def _default_parameter(a: float | None) -> float:
    # slightly above the optimum keeps every witness strictly interior
    a_star = optimal_disc_parameter().a_star
    if a is None:
        return a_star * (1.0 + 1e-6)
    if a < a_star - 1e-12:
        raise DomainError(
            f"parameter a={a} is below the disc-covering threshold {a_star}"
        )
    return float(a)


def _interleave_permutation(sizes: list[int]) -> np.ndarray:
    """Permutation sending each block's leading half to the front.

    Block i contributes ``sizes[i]`` prescribed coordinates (its local
    leading half) and as many slack ones; prescribed coordinates are packed
    first, slack ones after, both in block order.
    """
    total = sum(sizes)
    perm = np.zeros((2 * total, 2 * total))
    offset = 0
    for size in sizes:
        old_base = 2 * offset
        for j in range(size):
            perm[offset + j, old_base + j] = 1.0
            perm[total + offset + j, old_base + size + j] = 1.0
        offset += size
    return perm


def _assemble_plan(
    block_unitaries: list[np.ndarray], sizes: list[int], a: float
) -> PinchingPlan:
    total = sum(sizes)
    source = OperatorModel(
        exceptional=np.zeros((0, 0), dtype=complex),
        repeated=oblique_projection(a),
    )
    unitary = _interleave_permutation(sizes) @ block_diag(*block_unitaries)
    blocks, labels = [], []
    offset = 0
    for size in sizes:
        blocks.append(tuple(range(offset, offset + size)))
        labels.append("prescribed")
        offset += size
    offset = 0
    for size in sizes:
        blocks.append(tuple(range(total + offset, total + offset + size)))
        labels.append("slack")
        offset += size
    partition = MasaPartition(
        dim=2 * total, blocks=tuple(blocks), labels=tuple(labels)
    )
    conjugated = unitary @ source.truncation(total) @ unitary.conj().T
    return PinchingPlan(
        ambient_dim=2 * total,
        unitary=unitary,
        partition=partition,
        source=source,
        copies=total,
        prescribed_positions=tuple(range(total)),
        realized=conditional_expectation(conjugated, partition),
    )


def realize_diagonal(values, a: float | None = None) -> PinchingPlan:
    """Realize strictly contractive complex values as leading diagonal entries.

    Builds one oblique-projection copy per value, rotates each so its
    witness vector reads the value on the first coordinate, and permutes
    the prescribed coordinates to the front.  Position n+i carries the
    forced complement 1 - values[i] (each copy has trace one).
    """
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if values.ndim != 1 or len(values) == 0:
        raise FormatError("values must be a nonempty vector")
    if np.any(np.abs(values) >= 1.0):
        worst = values[int(np.argmax(np.abs(values)))]
        raise ValueOutOfDiscError(f"value {worst} has modulus >= 1")
    a = _default_parameter(a)
    block_unitaries = []
    for x in values:
        witness = range_witness(a, complex(x))
        block_unitaries.append(complete_orthonormal([witness], 2).conj().T)
    return _assemble_plan(block_unitaries, [1] * len(values), a)


def diagonalize_normal(x, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Unitary diagonalization X = W diag(d) W* of a normal matrix.

    Splits X into commuting Hermitian and skew parts, diagonalizes the
    Hermitian part, then diagonalizes the skew part inside each eigenspace.
    Raises NotNormalError when the residual exceeds ``tol``.
    """
    x = require_square(as_matrix(x))
    n = x.shape[0]
    scale = max(operator_norm(x), 1.0)
    herm = (x + x.conj().T) / 2.0
    skew = (x - x.conj().T) / 2j
    lam, vec = np.linalg.eigh(herm)
    cols = np.zeros((n, n), dtype=complex)
    start = 0
    for stop in range(1, n + 1):
        if stop == n or lam[stop] - lam[stop - 1] > tol * scale:
            basis = vec[:, start:stop]
            _, rot = np.linalg.eigh(basis.conj().T @ skew @ basis)
            cols[:, start:stop] = basis @ rot
            start = stop
    diag = np.einsum("ij,jk,ik->i", cols.conj().T, x, cols.T)
    if frobenius(cols.conj().T @ x @ cols - np.diag(diag)) > tol * scale:
        raise NotNormalError("matrix is not normal within tolerance")
    return cols, diag


def realize_normal_blocks(blocks, a: float | None = None) -> PinchingPlan:
    """Realize normal strict contractions as the leading partition blocks.

    Each block is diagonalized, its eigenvalues realized entrywise through
    witness vectors, and the eigenbasis folded back into the block isometry,
    so the prescribed compressions reproduce the blocks exactly.  Slack
    blocks of matching sizes carry the forced complementary compressions.
    """
    mats = [require_square(as_matrix(b)) for b in blocks]
    if not mats:
        raise FormatError("at least one block is required")
    a = _default_parameter(a)
    sizes = []
    block_unitaries = []
    for x in mats:
        size = x.shape[0]
        if size == 0:
            raise FormatError("blocks must be nonempty")
        if frobenius(x @ x.conj().T - x.conj().T @ x) > 1e-10 * max(
            1.0, frobenius(x) ** 2
        ):
            raise NotNormalError("block is not normal within tolerance")
        if operator_norm(x) >= 1.0:
            raise ValueOutOfDiscError(f"block norm {operator_norm(x)} is >= 1")
        eigbasis, eigvals = diagonalize_normal(x)
        isometry = np.zeros((2 * size, size), dtype=complex)
        for j, value in enumerate(eigvals):
            isometry[2 * j : 2 * j + 2, j] = range_witness(a, complex(value))
        lifted = isometry @ eigbasis.conj().T
        completion = complete_orthonormal(list(lifted.T), 2 * size)
        block_unitaries.append(completion.conj().T)
        sizes.append(size)
    return _assemble_plan(block_unitaries, sizes, a)


def two_orbit_average(plan: PinchingPlan) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two unitaries whose averaged orbit is exactly block diagonal.

    With U the plan unitary and J the sign flip across the prescribed/forced
    boundary, V = J U satisfies (U A U* + V A V*)/2 = the pinching of U A U*
    to the two half-spaces: the off-diagonal corners cancel identically.
    Returns (U, V, average).
    """
    signs = np.ones(plan.ambient_dim)
    signs[len(plan.prescribed_positions) :] = -1.0
    conj = plan.conjugated()
    average = (conj + signs[:, None] * conj * signs[None, :]) / 2.0
    return plan.unitary, signs[:, None] * plan.unitary, average


@dataclass(frozen=True)
class AlignmentResult:
    """Permutation alignment of a doubled space with per-column errors."""

    permutation: np.ndarray
    aligned: np.ndarray
    errors: np.ndarray


def strong_approx(x, t, n: int) -> AlignmentResult:
    """Align the first n coordinates of X + T with the ambient basis.

    The permutation maps coordinate j of the first copy to j for j < n;
    the second copy fills the next m slots and the displaced tail of the
    first copy goes last.  errors[j] measures how far the aligned operator,
    applied to the image of the j-th first-copy basis vector, is from the
    embedded X column; it is exactly zero whenever column j of X is
    supported in the first n coordinates.
    """
    x = require_square(as_matrix(x))
    t = require_square(as_matrix(t))
    m = x.shape[0]
    if t.shape[0] != m:
        raise DimensionMismatchError(f"shapes {x.shape} and {t.shape} differ")
    if not 0 <= n <= m:
        raise DomainError(f"n must lie in 0..{m}, got {n}")
    target_of_source = np.empty(2 * m, dtype=int)
    target_of_source[:n] = np.arange(n)
    target_of_source[m : 2 * m] = n + np.arange(m)
    target_of_source[n:m] = m + np.arange(n, m)
    perm = np.zeros((2 * m, 2 * m))
    perm[target_of_source, np.arange(2 * m)] = 1.0

    aligned = perm @ block_diag(x, t) @ perm.T
    applied = aligned @ perm[:, :m]
    embedded = np.concatenate([x, np.zeros((m, m), dtype=complex)], axis=0)
    errors = np.linalg.norm(applied - embedded, axis=0)
    return AlignmentResult(permutation=perm, aligned=aligned, errors=errors)


def hermitian_orbit_distance(a, x, tol: float = 1e-10) -> float:
    """Distance between the unitary orbits of two Hermitian matrices.

    Equals the largest gap between sorted eigenvalues; a spectral mismatch
    certifies that neither matrix can be approximated in norm from the
    other's unitary orbit.
    """
    a = check_hermitian(a, tol)
    x = check_hermitian(x, tol)
    if a.shape != x.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {x.shape} differ")
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(a) - np.linalg.eigvalsh(x))))
