"""Dense complex linear algebra used throughout qmask.

Matrices are plain complex :class:`numpy.ndarray` objects.  The functions
here add the validation and conventions the rest of the package relies on
(ascending eigenvalues, descending singular values, PSD clamping) on top of
LAPACK via numpy.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DecompositionError, DimensionError, NormalizationError, NotHermitianError, NotPSDError

__all__ = [
    "HermitianEigen",
    "Svd",
    "as_matrix",
    "is_hermitian",
    "hermitian_eigen",
    "svd",
    "trace_norm",
    "frobenius_norm",
    "psd_sqrt",
    "check_density_matrix",
    "fidelity",
    "haar_unitary",
    "random_density_matrix",
    "is_unitary",
]

HERMITICITY_TOL = 1e-8
TRACE_NORM_HERMITIAN_TOL = 1e-10
CLAMP_TOL = 1e-9
DENSITY_TOL = 1e-8


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns


class Svd(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray  # descending, >= 0
    right: np.ndarray  # V, so that A = left @ diag(s) @ right^dagger


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Return `a` as a finite 2-D complex array, raising on bad input."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError("matrix has non-finite entries")
    return m


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T))


def is_hermitian(a, tol: float = HERMITICITY_TOL) -> bool:
    """Relative Hermiticity test: ``||A - A^dag||_F <= tol * max(1, ||A||_F)``."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return _hermitian_defect(m) <= tol * max(1.0, float(np.linalg.norm(m)))


def is_unitary(a, tol: float = 1e-10) -> bool:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0]))) <= tol


def hermitian_eigen(a, hermiticity_tol: float = HERMITICITY_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized to ``(A + A^dag)/2`` before decomposition, but
    an anti-Hermitian part larger than `hermiticity_tol` (relative to
    ``max(1, ||A||_F)``) is rejected rather than dropped.
    """
    m = as_matrix(a, square=True)
    if not is_hermitian(m, hermiticity_tol):
        raise NotHermitianError(
            f"||A - A^dag||_F = {_hermitian_defect(m):.3e} exceeds tolerance {hermiticity_tol:g}"
        )
    h = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigh failed to converge: {exc}") from exc
    return HermitianEigen(w, v)


def svd(a) -> Svd:
    """Full singular value decomposition with singular values descending."""
    m = as_matrix(a)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"svd failed to converge: {exc}") from exc
    return Svd(u, s, vh.conj().T)


def trace_norm(a) -> float:
    """Schatten-1 norm: the sum of singular values.

    Hermitian inputs (within 1e-10 relative) take the cheaper route of
    summing absolute eigenvalues.
    """
    m = as_matrix(a)
    if m.shape[0] == m.shape[1] and is_hermitian(m, TRACE_NORM_HERMITIAN_TOL):
        try:
            w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        except np.linalg.LinAlgError as exc:
            raise DecompositionError(f"eigvalsh failed to converge: {exc}") from exc
        return float(np.sum(np.abs(w)))
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"svd failed to converge: {exc}") from exc
    return float(np.sum(s))


def frobenius_norm(a) -> float:
    """Hilbert-Schmidt norm, ``sqrt(sum |a_ij|^2)``."""
    return float(np.linalg.norm(as_matrix(a)))


def psd_sqrt(p, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are treated as round-off and set to
    zero; anything more negative raises :class:`NotPSDError`.
    """
    w, v = hermitian_eigen(p)
    if w[0] < -clamp_tol:
        raise NotPSDError(f"smallest eigenvalue {w[0]:.3e} is below -{clamp_tol:g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def check_density_matrix(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace) and return it."""
    m = as_matrix(rho, square=True)
    if not is_hermitian(m, tol):
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > tol:
        raise NormalizationError(f"density matrix trace is {tr.real:.12g}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if w[0] < -tol:
        raise NotPSDError(f"density matrix has eigenvalue {w[0]:.3e}")
    return m


def fidelity(p, q) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(P) Q sqrt(P))`` (not squared).

    Evaluated as ``||sqrt(P) sqrt(Q)||_1``, which is the same quantity and
    behaves better when either state is rank deficient.
    """
    p = check_density_matrix(p)
    q = check_density_matrix(q)
    if p.shape != q.shape:
        raise DimensionError(f"shape mismatch {p.shape} vs {q.shape}")
    return trace_norm(psd_sqrt(p) @ psd_sqrt(q))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample an n x n unitary from the Haar measure.

    QR of a complex Ginibre matrix, with the phases of R's diagonal moved
    into Q so the result is Haar rather than QR-biased.
    """
    if n < 1:
        raise DimensionError("unitary dimension must be positive")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random density matrix ``G G^dag / Tr(G G^dag)``."""
    if n < 1:
        raise DimensionError("density matrix dimension must be positive")
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
