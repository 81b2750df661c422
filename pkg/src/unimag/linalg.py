"""Dense complex matrix kernels.

Every operator in the package (Hamiltonians, propagators, normalizers and
generator densities) is carried as a square ``complex128`` ndarray.  The
functions here are pure and never mutate their arguments.

Tolerances are measured in the Frobenius norm throughout.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

Array = np.ndarray

__all__ = [
    "NumericalError",
    "SingularMatrixError",
    "NotPositiveDefiniteError",
    "NotHermitianError",
    "BranchCutError",
    "DimensionMismatchError",
    "as_matrix",
    "adjoint",
    "commutator",
    "expm",
    "logm",
    "sqrtm_pd",
    "inv",
    "fro_norm",
    "hermiticity_defect",
    "is_hermitian",
    "hermitian_part",
    "unitarity_defect",
    "polar_unitary",
]

HERMITIAN_RTOL = 1e-10
CONDITION_CAP = 1e12
LOGM_EIG_COND_CAP = 1e8


class NumericalError(ArithmeticError):
    """Base class for failures of a matrix function on a valid-looking input."""


class SingularMatrixError(NumericalError):
    def __init__(self, condition: float, cap: float):
        self.condition = condition
        self.cap = cap
        super().__init__(f"matrix is singular or ill-conditioned: cond = {condition:.3e} > cap {cap:.1e}")


class NotPositiveDefiniteError(NumericalError):
    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"matrix is not positive definite: min eigenvalue = {min_eigenvalue:.3e}")


class NotHermitianError(NumericalError):
    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"matrix is not Hermitian: ||A - A^H||_F = {defect:.3e}")


class BranchCutError(NumericalError):
    def __init__(self, eigenvalue: complex):
        self.eigenvalue = eigenvalue
        super().__init__(f"eigenvalue {eigenvalue:.6g} lies on the principal-log branch cut (-inf, 0]")


class DimensionMismatchError(ValueError):
    pass


def as_matrix(A) -> Array:
    """Coerce ``A`` to a finite square complex matrix."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _same_dim(A: Array, B: Array) -> None:
    if A.shape != B.shape:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape} vs {B.shape}")


def adjoint(A) -> Array:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(np.asarray(A, dtype=np.complex128), -1, -2))


def commutator(A, B) -> Array:
    """``[A, B] = AB - BA``.  Works on stacks of matrices as well."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape[-2:] != B.shape[-2:]:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def fro_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A), ord="fro"))


def hermiticity_defect(A) -> float:
    A = np.asarray(A, dtype=np.complex128)
    return fro_norm(A - adjoint(A))


def is_hermitian(A, rtol: float = HERMITIAN_RTOL) -> bool:
    """Scale-invariant test ``||A - A^H|| <= rtol * max(1, ||A||)``."""
    return hermiticity_defect(A) <= rtol * max(1.0, fro_norm(A))


def hermitian_part(A) -> Array:
    A = np.asarray(A, dtype=np.complex128)
    return 0.5 * (A + adjoint(A))


def unitarity_defect(P) -> float:
    """``||P^H P - I||_F``."""
    P = np.asarray(P, dtype=np.complex128)
    return fro_norm(adjoint(P) @ P - np.eye(P.shape[-1]))


def expm(A) -> Array:
    """Matrix exponential.

    Scaling and squaring with a degree-13 diagonal Pade approximant
    (Al-Mohy & Higham), as provided by :func:`scipy.linalg.expm`.  Stacks of
    matrices with shape ``(..., d, d)`` are exponentiated elementwise.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim == 2:
        A = as_matrix(A)
    return scipy.linalg.expm(A)


def logm(A) -> Array:
    """Principal matrix logarithm.

    Uses the eigendecomposition when ``A`` is diagonalizable with a
    well-conditioned eigenbasis, and inverse scaling and squaring otherwise.
    Only used as a test oracle.

    Raises
    ------
    BranchCutError
        If an eigenvalue lies on the closed negative real axis.
    """
    A = as_matrix(A)
    w, V = np.linalg.eig(A)
    scale = max(1.0, float(np.max(np.abs(w))))
    for lam in w:
        if lam.real <= 0 and abs(lam.imag) <= 1e-14 * scale:
            raise BranchCutError(complex(lam))
    if np.linalg.cond(V) < LOGM_EIG_COND_CAP:
        return (V * np.log(w)) @ np.linalg.inv(V)
    return np.asarray(scipy.linalg.logm(A), dtype=np.complex128)


def sqrtm_pd(A) -> Array:
    """Unique Hermitian positive-definite square root of a Hermitian PD matrix.

    The input is symmetrized as ``(A + A^H)/2`` before a Hermitian
    eigendecomposition.

    Raises
    ------
    NotHermitianError
        If ``||A - A^H||_F > 1e-10 * max(1, ||A||_F)``.
    NotPositiveDefiniteError
        If the smallest eigenvalue is not positive.
    """
    A = as_matrix(A)
    if not is_hermitian(A):
        raise NotHermitianError(hermiticity_defect(A))
    w, V = np.linalg.eigh(hermitian_part(A))
    if w[0] <= 0:
        raise NotPositiveDefiniteError(float(w[0]))
    S = (V * np.sqrt(w)) @ adjoint(V)
    return hermitian_part(S)


def inv(A, cap: float = CONDITION_CAP) -> Array:
    """Matrix inverse, refusing matrices with 2-norm condition number above ``cap``."""
    A = as_matrix(A)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > cap:
        raise SingularMatrixError(cond, cap)
    return np.linalg.inv(A)


def polar_unitary(A) -> Array:
    """Unitary factor of the polar decomposition, from the SVD ``A = W S V^H``."""
    W, _, Vh = np.linalg.svd(as_matrix(A))
    return W @ Vh
