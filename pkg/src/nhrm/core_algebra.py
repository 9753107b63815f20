"""Closed-form linear algebra for complex 2x2 matrices.

Everything here is scalar Python/numpy on a single 2x2 block.  The square
root branch is fixed once (:func:`principal_sqrt`) and used everywhere the
band energy is formed, so eigenvalue labels are deterministic.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ParameterError

#: Relative threshold on |discriminant| / ||m||_F^2 below which a
#: non-scalar matrix is reported as defective (an exceptional point).
TOL_EP = 1e-10

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_complex2x2(m) -> np.ndarray:
    """Return ``m`` as a finite complex (2, 2) array or raise ParameterError."""
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (2, 2):
        raise ParameterError(f"expected a 2x2 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("matrix has non-finite entries")
    return arr


def principal_sqrt(z: complex) -> complex:
    """Square root with non-negative real part.

    On the branch cut (negative real axis, including a signed ``-0.0``
    imaginary part) the root with non-negative imaginary part is returned,
    so ``principal_sqrt(-1) == 1j`` regardless of the sign of zero.
    """
    r = cmath.sqrt(complex(z))
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return r


@dataclass(frozen=True)
class EigenResult:
    lambda_plus: complex
    lambda_minus: complex
    vec_plus: np.ndarray
    vec_minus: Optional[np.ndarray]  # None when defective
    defective: bool


def _eigvec(m: np.ndarray, lam: complex) -> Optional[np.ndarray]:
    # Two candidate null vectors of (m - lam); keep the better conditioned one.
    a11, a12, a21, a22 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    c1 = np.array([a12, lam - a11])
    c2 = np.array([lam - a22, a21])
    n1, n2 = np.linalg.norm(c1), np.linalg.norm(c2)
    v = c1 if n1 >= n2 else c2
    n = max(n1, n2)
    if n == 0.0:
        return None
    return v / n


def is_scalar_matrix(m, rtol: float = 1e-12) -> bool:
    """True when ``m`` is (numerically) a multiple of the identity."""
    m = np.asarray(m, dtype=complex)
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return True
    shifted = m - 0.5 * np.trace(m) * SIGMA_0
    return bool(np.linalg.norm(shifted) <= rtol * scale)


def eig2(m, tol_ep: float = TOL_EP) -> EigenResult:
    """Eigen-decomposition of a complex 2x2 matrix.

    The eigenvalues are ``(tr +/- s)/2`` with ``s = principal_sqrt(tr^2 - 4 det)``;
    the smaller-magnitude one is recovered from ``det / lambda`` to avoid
    cancellation.  A non-scalar matrix with ``|disc| <= tol_ep * ||m||_F^2`` is
    flagged defective and only ``vec_plus`` is returned.
    """
    m = as_complex2x2(m)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    s = principal_sqrt(disc)
    scale2 = float(np.sum(np.abs(m) ** 2))

    big_is_plus = (tr.conjugate() * s).real >= 0
    big = 0.5 * (tr + s) if big_is_plus else 0.5 * (tr - s)
    small = det / big if big != 0 else 0.5 * (tr - s if big_is_plus else tr + s)
    lam_p, lam_m = (big, small) if big_is_plus else (small, big)

    scalar = is_scalar_matrix(m)
    defective = (not scalar) and abs(disc) <= tol_ep * scale2

    if scalar:
        return EigenResult(lam_p, lam_m, np.array([1, 0], dtype=complex),
                           np.array([0, 1], dtype=complex), False)
    if defective:
        lam = 0.5 * tr
        return EigenResult(lam, lam, _eigvec(m, lam), None, True)
    return EigenResult(lam_p, lam_m, _eigvec(m, lam_p), _eigvec(m, lam_m), False)
