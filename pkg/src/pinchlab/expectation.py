"""Discrete masas as coordinate partitions and their conditional expectation.

A discrete masa is modeled by an ordered partition of the coordinate
indices; the conditional expectation onto it is the block pinching
Z -> sum_i P_i Z P_i that zeroes every entry whose row and column fall in
different blocks.  It is unital, positive, trace preserving, idempotent,
and a module map over block-diagonal matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, FormatError
from .linalg import as_matrix, random_unit_vector, require_square
from .numrange import nr_boundary, support_profile


@dataclass(frozen=True)
class MasaPartition:
    """Ordered partition of {0, ..., dim-1} into disjoint blocks.

    ``labels``, when present, names each block (e.g. "prescribed"/"slack").
    """

    dim: int
    blocks: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None
    _block_of: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = np.full(self.dim, -1, dtype=int)
        for b, block in enumerate(self.blocks):
            if len(block) == 0:
                raise FormatError("partition blocks must be nonempty")
            for i in block:
                if not 0 <= i < self.dim:
                    raise FormatError(f"index {i} outside 0..{self.dim - 1}")
                if seen[i] != -1:
                    raise FormatError(f"index {i} appears in two blocks")
                seen[i] = b
        if np.any(seen == -1):
            raise FormatError("partition blocks must cover every index")
        if self.labels is not None and len(self.labels) != len(self.blocks):
            raise FormatError("one label per block required")
        object.__setattr__(self, "_block_of", seen)

    def mask(self) -> np.ndarray:
        """Boolean (dim, dim) mask of entries kept by the pinching."""
        return self._block_of[:, None] == self._block_of[None, :]

    def projections(self) -> list[np.ndarray]:
        """Coordinate projections P_i, one per block; they sum to I exactly."""
        out = []
        for block in self.blocks:
            p = np.zeros((self.dim, self.dim), dtype=complex)
            for i in block:
                p[i, i] = 1.0
            out.append(p)
        return out

    def to_json(self) -> dict:
        obj = {
            "dim": self.dim,
            "blocks": [[i + 1 for i in block] for block in self.blocks],
        }
        if self.labels is not None:
            obj["labels"] = list(self.labels)
        return obj

    @staticmethod
    def from_json(obj) -> "MasaPartition":
        try:
            dim = int(obj["dim"])
            blocks = tuple(tuple(int(i) - 1 for i in b) for b in obj["blocks"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed partition JSON: {exc}") from exc
        labels = tuple(obj["labels"]) if "labels" in obj else None
        return MasaPartition(dim=dim, blocks=blocks, labels=labels)


def singleton_masa(dim: int) -> MasaPartition:
    """The diagonal masa: every coordinate its own block."""
    return MasaPartition(dim=dim, blocks=tuple((i,) for i in range(dim)))


def parse_blocks(text: str, dim: int | None = None) -> MasaPartition:
    """Parse the 1-based grammar "1;2;3,4": semicolons split blocks,
    commas split indices.  ``dim`` defaults to the largest index mentioned.
    """
    blocks = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            raise FormatError("empty block in partition grammar")
        try:
            blocks.append(tuple(int(tok) - 1 for tok in part.split(",")))
        except ValueError as exc:
            raise FormatError(f"bad index in partition grammar: {exc}") from exc
    inferred = max(max(b) for b in blocks) + 1
    return MasaPartition(dim=dim if dim is not None else inferred, blocks=tuple(blocks))


def conditional_expectation(z, masa: MasaPartition) -> np.ndarray:
    """Block pinching sum_i P_i Z P_i: keep same-block entries, zero the rest."""
    z = require_square(as_matrix(z))
    if z.shape[0] != masa.dim:
        raise DimensionMismatchError(
            f"matrix dim {z.shape[0]} != partition dim {masa.dim}"
        )
    return np.where(masa.mask(), z, 0.0)


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of sampling W(E(Z)) against the support certificate of W(Z)."""

    passed: bool
    points_checked: int
    worst_excess: float
    witness: complex | None


def check_reduction(
    z,
    masa: MasaPartition,
    samples: int,
    *,
    margin: float = 1e-8,
    resolution: int = 720,
    rng: np.random.Generator | None = None,
) -> ReductionReport:
    """Verify the numerical range of E(Z) sits inside that of Z.

    Draws ``samples`` random unit vectors h, evaluates <h, E(Z) h>, and also
    takes every sampled boundary point of W(E(Z)); each point must pass the
    support certificate of Z at the given margin.
    """
    if samples < 1:
        raise FormatError(f"samples must be >= 1, got {samples}")
    rng = rng if rng is not None else np.random.default_rng(0)
    z = require_square(as_matrix(z))
    expected = conditional_expectation(z, masa)

    vectors = np.stack([random_unit_vector(masa.dim, rng) for _ in range(samples)])
    sampled = np.einsum("si,ij,sj->s", vectors.conj(), expected, vectors)
    boundary = nr_boundary(expected, resolution).points
    points = np.concatenate([sampled, boundary])

    excesses = support_profile(z, resolution).excess(points)
    worst = int(np.argmax(excesses))
    passed = bool(excesses[worst] <= margin)
    return ReductionReport(
        passed=passed,
        points_checked=len(points),
        worst_excess=float(excesses[worst]),
        witness=None if passed else complex(points[worst]),
    )
