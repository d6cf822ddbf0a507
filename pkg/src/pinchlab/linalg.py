"""Dense complex matrix kernels used by every other module.

All operations are pure, deterministic, and tolerance-checked.  Matrices are
plain ``numpy.ndarray`` in complex128; the JSON wire format is
``{"rows": n, "cols": m, "data": [[re, im], ...]}`` row-major and round-trips
finite doubles bit-exactly.  0x0 matrices are legal inputs everywhere and
produce empty outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    FormatError,
    NoConvergenceError,
    NotHermitianError,
    NotOrthonormalError,
)

DEFAULT_TOL = 1e-10


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting non-finite entries."""
    m = np.asarray(values, dtype=complex)
    if m.ndim != 2:
        raise FormatError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise FormatError("matrix entries must be finite")
    return m


def require_square(m: np.ndarray) -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise FormatError(f"expected a square matrix, got shape {m.shape}")
    return m


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value; 0.0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_error(h: np.ndarray) -> float:
    return frobenius(h - h.conj().T)


def check_hermitian(h: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate ||H - H*|| <= tol * ||H|| and return H unchanged."""
    h = require_square(as_matrix(h))
    if hermitian_error(h) > tol * max(frobenius(h), 1.0) and h.size:
        raise NotHermitianError(
            f"matrix deviates from its adjoint by {hermitian_error(h):.3e}"
        )
    return h


@dataclass(frozen=True)
class HermitianSpectrum:
    """Full eigensystem of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(h, tol: float = DEFAULT_TOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    Raises NotHermitianError when the input is not Hermitian within ``tol``
    and NoConvergenceError if the underlying iteration fails.
    """
    h = check_hermitian(h, tol)
    try:
        w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergenceError(str(exc)) from exc
    return HermitianSpectrum(eigenvalues=w, eigenvectors=v)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD ``M = U @ diag(s) @ V.conj().T`` with s descending.

    Returns (U, s, V); note the third factor is V itself, not its adjoint.
    """
    m = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergenceError(str(exc)) from exc
    return u, s, vh.conj().T


def pos_neg_parts(h, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split Hermitian H into positive parts: H = H_plus - H_minus.

    Both returned matrices are positive semidefinite and annihilate each
    other (they live on complementary spectral subspaces).
    """
    spec = hermitian_eig(h, tol)
    v = spec.eigenvectors
    plus = (v * np.maximum(spec.eigenvalues, 0.0)) @ v.conj().T
    minus = (v * np.maximum(-spec.eigenvalues, 0.0)) @ v.conj().T
    return plus, minus


def complete_orthonormal(vectors, dim: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend orthonormal vectors to a dim x dim unitary (given vectors first).

    ``vectors`` is a sequence of length-``dim`` vectors (possibly empty).
    Raises NotOrthonormalError when their Gram matrix deviates from the
    identity by more than ``tol``.
    """
    cols = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not cols:
        return np.eye(dim, dtype=complex)
    basis = np.column_stack(cols)
    if basis.shape[0] != dim:
        raise FormatError(
            f"vectors have length {basis.shape[0]}, expected {dim}"
        )
    k = basis.shape[1]
    gram = basis.conj().T @ basis
    if frobenius(gram - np.eye(k)) > tol:
        raise NotOrthonormalError(
            f"Gram matrix deviates from identity by {frobenius(gram - np.eye(k)):.3e}"
        )
    if k > dim:
        raise NotOrthonormalError(f"{k} orthonormal vectors cannot fit in dim {dim}")
    u, _, _ = svd(basis)
    return np.concatenate([basis, u[:, k:]], axis=1)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary via phase-fixed QR of a Ginibre matrix."""
    if dim == 0:
        return np.zeros((0, 0), dtype=complex)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the complex unit sphere (normalized Gaussian)."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


# --- JSON wire format -------------------------------------------------------


def matrix_to_json(m) -> dict:
    """Serialize to the repo-wide row-major [re, im] pair format."""
    m = as_matrix(m)
    rows, cols = m.shape
    flat = m.reshape(-1)
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Parse and validate the matrix JSON format (bit-exact for doubles)."""
    if not isinstance(obj, dict):
        raise FormatError("matrix JSON must be an object")
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"matrix JSON missing or malformed field: {exc}") from exc
    if rows < 0 or cols < 0:
        raise FormatError("matrix dimensions must be nonnegative")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(
            f"matrix data length {len(data) if isinstance(data, list) else '?'} "
            f"!= rows*cols = {rows * cols}"
        )
    out = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(data):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise FormatError(f"entry {i} is not a [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (np.isfinite(re) and np.isfinite(im)):
            raise FormatError(f"entry {i} is not finite")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)
