"""Idempotent matrices: the oblique-projection family, canonical forms,
and the positive/negative defect of the Hermitian part.

Every idempotent is unitarily equivalent to I_k + 0_m + a direct sum of
2x2 blocks [[1, sigma], [0, 0]] with sigma > 0; the sigmas are the singular
values of the coupling between the range and its orthogonal complement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotIdempotentError
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    haar_unitary,
    operator_norm,
    pos_neg_parts,
    require_square,
    svd,
)


def oblique_projection(a: float) -> np.ndarray:
    """The 2x2 idempotent [[1, 0], [a, 0]]: rank one, trace one, norm sqrt(1+a^2).

    Projects onto the line spanned by (1, a) along the second coordinate.
    """
    if a <= 0:
        raise DomainError(f"parameter a must be > 0, got {a}")
    return np.array([[1.0, 0.0], [a, 0.0]], dtype=complex)


def is_idempotent(q, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||Q @ Q - Q|| <= tol * (1 + ||Q||^2)."""
    q = require_square(as_matrix(q))
    nq = operator_norm(q)
    return operator_norm(q @ q - q) <= tol * (1.0 + nq * nq)


@dataclass(frozen=True)
class IdempotentCanonicalForm:
    """Unitary normal form of an idempotent.

    ``basis.conj().T @ Q @ basis`` equals I_k + 0_m + blocks [[1, s], [0, 0]]
    for s in ``sigmas`` (descending).  The operator norm of Q is
    sqrt(1 + max(sigmas)^2) when sigmas is nonempty, else 0 or 1.
    """

    k: int
    m: int
    sigmas: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.k + self.m + 2 * len(self.sigmas)

    def canonical_matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in range(self.k):
            out[i, i] = 1.0
        pos = self.k + self.m
        for s in self.sigmas:
            out[pos, pos] = 1.0
            out[pos, pos + 1] = s
            pos += 2
        return out

    def norm(self) -> float:
        if len(self.sigmas):
            return float(np.sqrt(1.0 + np.max(self.sigmas) ** 2))
        return 1.0 if self.k else 0.0


def idempotent_canonical(q, tol: float = DEFAULT_TOL) -> IdempotentCanonicalForm:
    """Canonical decomposition of an idempotent matrix.

    Builds orthonormal bases of ran Q and its complement (where
    Q = [[I, B], [0, 0]]), then absorbs the SVD of the coupling B: zero
    singular values feed I_k and 0_m, positive ones feed the 2x2 blocks.
    """
    q = require_square(as_matrix(q))
    if not is_idempotent(q, tol):
        raise NotIdempotentError("matrix is not idempotent within tolerance")
    n = q.shape[0]
    if n == 0:
        return IdempotentCanonicalForm(
            k=0, m=0, sigmas=np.zeros(0), basis=np.zeros((0, 0), dtype=complex)
        )
    u, s, _ = svd(q)
    cutoff = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    r = int(np.count_nonzero(s > cutoff))
    range_basis, kernel_basis = u[:, :r], u[:, r:]
    coupling = range_basis.conj().T @ q @ kernel_basis
    ub, sb, vb = svd(coupling)
    n_pairs = int(np.count_nonzero(sb > cutoff))
    sigmas = np.asarray(sb[:n_pairs], dtype=float)
    k, m = r - n_pairs, (n - r) - n_pairs

    # rotate within range/kernel, then order columns: I_k, 0_m, coupled pairs
    rotated = np.concatenate([range_basis @ ub, kernel_basis @ vb], axis=1)
    order = list(range(n_pairs, r)) + list(range(r + n_pairs, n))
    for j in range(n_pairs):
        order += [j, r + j]
    basis = rotated[:, order]
    return IdempotentCanonicalForm(k=k, m=m, sigmas=sigmas, basis=basis)


@dataclass(frozen=True)
class DefectReport:
    """Norms of the positive/negative parts of Q + Q*."""

    pos_norm: float
    neg_norm: float
    holds: bool


def self_adjoint_defect(q, tol: float = DEFAULT_TOL) -> DefectReport:
    """Compare ||(Q + Q*)_+|| against ||(Q + Q*)_-|| for an idempotent Q.

    The positive part always dominates: in the canonical form each coupled
    pair contributes eigenvalues 1 +/- sqrt(1 + sigma^2) to Q + Q*.
    """
    q = require_square(as_matrix(q))
    if not is_idempotent(q, tol):
        raise NotIdempotentError("matrix is not idempotent within tolerance")
    plus, minus = pos_neg_parts(q + q.conj().T)
    pos, neg = operator_norm(plus), operator_norm(minus)
    return DefectReport(pos_norm=pos, neg_norm=neg, holds=pos >= neg - 1e-10)


def is_stable(x, tol: float = DEFAULT_TOL) -> bool:
    """True iff the Hermitian part (X + X*)/2 is negative definite.

    No nonzero idempotent is stable: its Hermitian part has trace equal to
    twice the rank, hence a positive eigenvalue.
    """
    x = require_square(as_matrix(x))
    if x.size == 0:
        return False
    top = float(np.linalg.eigvalsh((x + x.conj().T) / 2.0)[-1])
    return top < -tol


@dataclass(frozen=True)
class GeneratedIdempotent:
    """Random idempotent together with the canonical data that built it."""

    matrix: np.ndarray
    k: int
    m: int
    sigmas: np.ndarray


def random_idempotent(
    rng: np.random.Generator, max_dim: int = 12, min_dim: int = 1
) -> GeneratedIdempotent:
    """Sample a canonical form (k, m, sigmas) and conjugate by a Haar unitary.

    Idempotency is exact by construction; the stratification (pure
    projection, purely coupled, mixed) is fully covered.
    """
    dim = int(rng.integers(min_dim, max_dim + 1))
    n_pairs = int(rng.integers(0, dim // 2 + 1))
    rest = dim - 2 * n_pairs
    k = int(rng.integers(0, rest + 1))
    m = rest - k
    sigmas = np.sort(rng.uniform(0.1, 3.0, size=n_pairs))[::-1]
    form = IdempotentCanonicalForm(
        k=k, m=m, sigmas=sigmas, basis=np.eye(dim, dtype=complex)
    )
    u = haar_unitary(dim, rng)
    return GeneratedIdempotent(
        matrix=u @ form.canonical_matrix() @ u.conj().T, k=k, m=m, sigmas=sigmas
    )
