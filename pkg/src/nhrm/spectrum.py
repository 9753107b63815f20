"""Band energies, eigenvectors and per-momentum classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core_algebra import TOL_EP, is_scalar_matrix, principal_sqrt
from .exceptions import Coalescent, InvariantViolation, ParameterError
from .lattice import (
    ModelParams,
    Momentum,
    build_bloch,
    diag_term,
    offdiag_norm2,
    offdiag_term,
)

#: |Im eps^2| below this (relative to the squared energy scale) counts as real.
TOL_REAL = 1e-12
#: Minimum normalized biorthogonal overlap before the frame is declared degenerate.
TOL_COALESCENT = 1e-8


class PointClass(str, enum.Enum):
    REAL_PAIR = "RealPair"
    IMAGINARY_PAIR = "ImaginaryPair"
    EP = "EP"


@dataclass(frozen=True)
class BandPoint:
    k: Momentum
    eps: complex
    eps2: complex
    vec_minus: np.ndarray
    vec_plus: np.ndarray
    classification: PointClass


@dataclass(frozen=True)
class BiorthPair:
    right_minus: np.ndarray
    right_plus: np.ndarray
    left_minus: np.ndarray
    left_plus: np.ndarray
    omega: complex


def _as_momentum(k) -> Momentum:
    return k if isinstance(k, Momentum) else Momentum(*k)


def eps_squared(params: ModelParams, k) -> complex:
    """``eps^2 = J^2 |q|^2 + D^2``: the square of the band energy."""
    k = _as_momentum(k)
    d = diag_term(params, k)
    return params.j ** 2 * offdiag_norm2(params, k.kx) + d * d


def eps_squared_grad(params: ModelParams, k) -> np.ndarray:
    """Gradient of ``eps^2`` with respect to ``(kx, ky)`` (complex entries)."""
    k = _as_momentum(k)
    d = diag_term(params, k)
    d_kx = -2.0 * params.j ** 2 * params.w * params.v * math.sin(k.kx)
    d_ky = 0.0 if params.is_chain else 2.0 * d * (-2.0 * params.g * math.sin(k.ky))
    return np.array([d_kx, d_ky], dtype=complex)


def classify_eps2(params: ModelParams, k, e2: complex) -> PointClass:
    s2 = params.energy_scale ** 2
    if abs(e2) <= TOL_EP * s2:
        if not is_scalar_matrix(build_bloch(params, k).matrix):
            return PointClass.EP
        return PointClass.REAL_PAIR
    if abs(e2.imag) <= TOL_REAL * s2 and e2.real > 0:
        return PointClass.REAL_PAIR
    return PointClass.IMAGINARY_PAIR


def classify_point(params: ModelParams, k) -> PointClass:
    """RealPair, ImaginaryPair (including complex eps^2) or EP."""
    k = _as_momentum(k)
    return classify_eps2(params, k, eps_squared(params, k))


def _column(d: complex, jq: complex, lam: complex) -> np.ndarray:
    # Eigenvector of h for eigenvalue lam, from the lower row (D - lam, Jq)
    # or, when that degenerates, the upper row (J conj(q), -(D + lam)).
    c1 = np.array([d - lam, jq])
    c2 = np.array([jq.conjugate(), -(d + lam)])
    n1, n2 = np.linalg.norm(c1), np.linalg.norm(c2)
    if n1 == 0.0 and n2 == 0.0:
        return np.array([1.0, 0.0], dtype=complex)
    return c1 / n1 if n1 >= n2 else c2 / n2


def band_pair(params: ModelParams, k) -> BandPoint:
    """Band energy ``eps`` (principal root) and Dirac-normalized eigenvectors.

    ``vec_minus`` belongs to ``-eps`` and ``vec_plus`` to ``+eps``.
    """
    k = _as_momentum(k)
    d = diag_term(params, k)
    jq = params.j * offdiag_term(params, k)
    e2 = params.j ** 2 * offdiag_norm2(params, k.kx) + d * d
    eps = principal_sqrt(e2)
    cls = classify_eps2(params, k, e2)
    vm = _column(d, jq, -eps)
    vp = vm.copy() if cls is PointClass.EP else _column(d, jq, eps)
    return BandPoint(k, eps, e2, vm, vp, cls)


def biorthogonal_pair(params: ModelParams, k) -> BiorthPair:
    """Left/right eigenvectors with ``<left_a|right_b> = delta_ab``.

    Right vectors solve ``h r = a eps r``; left vectors solve
    ``h^dagger l = conj(a eps) l``.  Each pair is scaled by ``1/sqrt(s_a)`` and
    ``1/conj(sqrt(s_a))`` where ``s_a`` is its raw overlap.  ``omega`` is the
    raw minus-branch overlap with the lower components set to one,
    ``2 eps (eps + i gamma) / (eps^2 + gamma^2)`` for the plain chain.
    """
    if not params.is_chain:
        raise ParameterError("biorthogonal pairs are defined for one-dimensional models", "variant")
    k = _as_momentum(k)
    d = diag_term(params, k)
    jq = params.j * offdiag_term(params, k)
    e2 = params.j ** 2 * offdiag_norm2(params, k.kx) + d * d
    if classify_eps2(params, k, e2) is PointClass.EP:
        raise Coalescent(f"k=({float(k[0]):.6g}, {float(k[1]):.6g}) is an exceptional point: the biorthogonal frame is self-orthogonal")
    eps = principal_sqrt(e2)

    out = {}
    s_min = math.inf
    for a in (-1, 1):
        lam = a * eps
        r = _column(d, jq, lam)
        l = _column(d.conjugate(), jq, lam.conjugate())  # h^dagger: D -> conj(D)
        s = np.vdot(l, r)
        if abs(s) < TOL_COALESCENT:
            raise Coalescent(f"biorthogonal overlap {abs(s):.3e} at k=({float(k[0]):.6g}, {float(k[1]):.6g}): frame degenerates")
        s_min = min(s_min, abs(s))
        root = principal_sqrt(s)
        out[a] = (r / root, l / root.conjugate())

    if abs(jq) > 0:
        omega = 1.0 + (d + eps) ** 2 / abs(jq) ** 2
    else:
        omega = complex(math.inf, 0.0)
    pair = BiorthPair(out[-1][0], out[1][0], out[-1][1], out[1][1], omega)

    # Round-off in the raw cross overlaps is amplified by 1/|s| near coalescence.
    tol = 1e-10 * max(1.0, 1e-6 / s_min)
    lefts = (pair.left_minus, pair.left_plus)
    rights = (pair.right_minus, pair.right_plus)
    for ia, la in enumerate(lefts):
        for ib, rb in enumerate(rights):
            target = 1.0 if ia == ib else 0.0
            if abs(np.vdot(la, rb) - target) > tol:
                raise InvariantViolation(f"biorthogonality fails at k=({float(k[0]):.6g}, {float(k[1]):.6g})")
    return pair
