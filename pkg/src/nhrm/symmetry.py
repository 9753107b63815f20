"""The antilinear symmetry Q_x = sigma_x K and its biorthogonal indicator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_algebra import SIGMA_X, as_complex2x2
from .exceptions import InvariantViolation
from .lattice import BlochMatrix, ModelParams, Momentum, build_bloch
from .spectrum import PointClass, biorthogonal_pair, classify_point

TOL_INDICATOR = 1e-8
TOL_SYMMETRIC = 1e-12


@dataclass(frozen=True)
class SymmetryReport:
    k: Momentum
    indicator: float
    phase: PointClass
    defect_norm: float


def apply_qx(vec) -> np.ndarray:
    """Act with Q_x on a ket: complex-conjugate first, then sigma_x.

    Q_x is antilinear and therefore never stored as a matrix.
    """
    return SIGMA_X @ np.conj(np.asarray(vec, dtype=complex))


def symmetry_defect(h) -> float:
    """Frobenius norm of ``sigma_x conj(h) sigma_x - h``; zero iff [Q_x, h] = 0."""
    m = as_complex2x2(h.matrix if isinstance(h, BlochMatrix) else h)
    return float(np.linalg.norm(SIGMA_X @ m.conj() @ SIGMA_X - m))


def qx_expectation(params: ModelParams, k) -> float:
    """``|<left_-| Q_x |right_->|`` in the biorthonormal basis of a chain.

    For a Q_x-symmetric chain this is 1 where eps is real and 0 where it is
    imaginary; anything else raises InvariantViolation.  Near an EP the
    biorthogonal frame degenerates and Coalescent propagates.
    """
    k = k if isinstance(k, Momentum) else Momentum(*k)
    pair = biorthogonal_pair(params, k)
    value = float(abs(np.vdot(pair.left_minus, apply_qx(pair.right_minus))))
    h = build_bloch(params, k)
    if symmetry_defect(h) <= TOL_SYMMETRIC * params.energy_scale:
        if min(abs(value), abs(value - 1.0)) > TOL_INDICATOR:
            raise InvariantViolation(f"Q_x indicator {value!r} is neither 0 nor 1 at k=({float(k[0]):.6g}, {float(k[1]):.6g})")
    return value


def symmetry_report(params: ModelParams, k) -> SymmetryReport:
    k = k if isinstance(k, Momentum) else Momentum(*k)
    phase = classify_point(params, k)
    indicator = float("nan") if phase is PointClass.EP else qx_expectation(params, k)
    return SymmetryReport(k, indicator, phase, symmetry_defect(build_bloch(params, k)))
