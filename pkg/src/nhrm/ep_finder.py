"""Exceptional-point location and phase-diagram classification."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from .exceptions import DegenerateParams
from .lattice import ModelParams, Momentum, canonical_angle
from .spectrum import eps_squared, eps_squared_grad

TOL_BOUNDARY = 1e-12
TOL_DEGENERATE = 1e-12
NEWTON_MAX_ITER = 50
NEWTON_STEP_TOL = 1e-14


class PhaseRegion(str, enum.Enum):
    BROKEN = "Broken"
    REAL_GAPPED = "RealGapped"
    IMAGINARY_GAPPED = "ImaginaryGapped"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class EPRecord:
    k_c: Momentum
    residual: float
    charge: Optional[float] = None

    def with_charge(self, charge: float) -> "EPRecord":
        return replace(self, charge=charge)


def classify_phase(delta: float, gamma_over_2j: float, tol: float = TOL_BOUNDARY) -> PhaseRegion:
    """Phase of the plain model (no potential shift) in the (delta, gamma/2J) plane.

    EPs exist when ``(G^2 - delta^2)(G^2 - 1) < 0`` with ``G = gamma/2J``; the
    lines ``|G| = |delta|`` and ``|G| = 1`` are boundaries.  The result does
    not depend on the inter-chain tunnelling ``g``.
    """
    a, d = abs(gamma_over_2j), abs(delta)
    if abs(a - d) <= tol or abs(a - 1.0) <= tol:
        return PhaseRegion.BOUNDARY
    a2 = a * a
    product = (a2 - d * d) * (a2 - 1.0)
    if product < 0:
        return PhaseRegion.BROKEN
    return PhaseRegion.REAL_GAPPED if a < d else PhaseRegion.IMAGINARY_GAPPED


def ep_cos2(params: ModelParams) -> float:
    """``cos^2(kx/2)`` at the EPs: ``[(gamma/2J)^2 - (delta + t_d/2)^2] / [w v]``.

    Raises DegenerateParams when ``w v = (1 - delta)(1 + delta + t_d)`` vanishes.
    """
    wv = params.w * params.v
    if abs(wv) < TOL_DEGENERATE:
        raise DegenerateParams(
            f"(1 - delta)(1 + delta + t_d) = {wv:.3e}: EPs are not isolated in kx", "delta")
    half_gamma = params.gamma / (2.0 * params.j)
    shift = params.delta + 0.5 * params.t_d
    return (half_gamma ** 2 - shift ** 2) / wv


def _kx_solutions(params: ModelParams, c: float) -> List[float]:
    # On a boundary line the two roots merge at kx = pi or 0.  Snap only when
    # the defining difference of squares cancels to rounding level.
    half_gamma2 = (params.gamma / (2.0 * params.j)) ** 2
    shift2 = (params.delta + 0.5 * params.t_d) ** 2
    top2 = (1.0 + 0.5 * params.t_d) ** 2
    ulp = 4.0 * sys.float_info.epsilon
    if abs(half_gamma2 - shift2) <= ulp * (half_gamma2 + shift2):
        c = 0.0
    elif abs(top2 - half_gamma2) <= ulp * (top2 + half_gamma2):
        c = 1.0
    c = min(max(c, 0.0), 1.0)
    k = 2.0 * math.acos(math.sqrt(c))
    sols = {canonical_angle(k), canonical_angle(-k)}
    return sorted(sols)


def _ky_solutions(params: ModelParams) -> List[float]:
    # Im eps^2 = 2 gamma (2 g cos ky + v_pot) must vanish.
    if params.is_chain:
        return [] if params.v_pot != 0.0 else [0.0]
    if params.g == 0.0:
        if params.v_pot == 0.0:
            raise DegenerateParams("g = 0 decouples the chains: EPs form lines along ky", "g")
        return []
    c = -params.v_pot / (2.0 * params.g)
    if abs(c) > 1.0 + TOL_BOUNDARY:
        return []
    if abs(c) >= 1.0:
        return [canonical_angle(0.0 if c > 0 else math.pi)]
    ky = math.acos(c)
    return sorted({canonical_angle(ky), canonical_angle(-ky)})


def _residual(params: ModelParams, k: Momentum) -> np.ndarray:
    e2 = eps_squared(params, k)
    return np.array([e2.real, e2.imag])


def newton_refine(params: ModelParams, k0: Momentum) -> Momentum:
    """Refine a root of ``(Re eps^2, Im eps^2)`` with an analytic Jacobian.

    Steps use a least-squares solve so merged (double) roots at kx = 0, pi do
    not blow up; a step is kept only if it does not increase the residual.
    """
    k = np.array([k0.kx, k0.ky], dtype=float)
    r = _residual(params, Momentum(*k))
    for _ in range(NEWTON_MAX_ITER):
        grad = eps_squared_grad(params, Momentum(*k))
        jac = np.array([[grad[0].real, grad[1].real], [grad[0].imag, grad[1].imag]])
        if params.is_chain:
            jac[:, 1] = 0.0
        step = np.linalg.lstsq(jac, -r, rcond=1e-12)[0]
        trial = k + step
        r_trial = _residual(params, Momentum(*trial))
        if np.linalg.norm(r_trial) > np.linalg.norm(r):
            break
        k, r = trial, r_trial
        if np.linalg.norm(step) < NEWTON_STEP_TOL:
            break
    return Momentum(canonical_angle(k[0]), 0.0 if params.is_chain else canonical_angle(k[1]))


def locate_eps(params: ModelParams) -> List[EPRecord]:
    """All exceptional points in ``[-pi, pi)^2`` (``[-pi, pi)`` for chains).

    Hermitian models (``gamma = 0``) have none.  Charges are left unset; see
    :func:`nhrm.field.assign_charges`.
    """
    if params.gamma == 0.0:
        return []
    c = ep_cos2(params)
    if c < -TOL_BOUNDARY or c > 1.0 + TOL_BOUNDARY:
        return []
    kys = _ky_solutions(params)
    out = []
    for ky in kys:
        for kx in _kx_solutions(params, c):
            k = newton_refine(params, Momentum(kx, ky))
            out.append(EPRecord(k, abs(eps_squared(params, k))))
    out.sort(key=lambda r: (r.k_c.kx, r.k_c.ky))
    return out


@dataclass(frozen=True)
class EPDomain:
    """EP-existence region of the hopping-perturbed chain in (delta, gamma/2J).

    ``contains`` is vectorized.  ``boundaries`` holds sampled polylines of the
    type-II lines (EP pinned at k = pi or k = 0); ``annotations`` lists the
    type-I parameter lines where the kx solver degenerates.
    """

    t_d: float
    boundaries: Dict[str, np.ndarray]
    annotations: Dict[str, float]

    def cos2(self, delta, gamma_over_2j):
        delta = np.asarray(delta, dtype=float)
        g = np.asarray(gamma_over_2j, dtype=float)
        num = g ** 2 - (delta + 0.5 * self.t_d) ** 2
        den = (1.0 - delta) * (1.0 + delta + self.t_d)
        with np.errstate(divide="ignore", invalid="ignore"):
            return num / den

    def contains(self, delta, gamma_over_2j):
        delta = np.asarray(delta, dtype=float)
        g = np.asarray(gamma_over_2j, dtype=float)
        num = g ** 2 - (delta + 0.5 * self.t_d) ** 2
        den = (1.0 - delta) * (1.0 + delta + self.t_d)
        degenerate = np.abs(den) < TOL_DEGENERATE
        safe = np.where(degenerate, 1.0, den)
        c = num / safe
        tol = TOL_BOUNDARY * (1.0 + np.abs(c))
        generic = (c >= -tol) & (c <= 1.0 + tol)
        out = np.where(degenerate, np.abs(num) <= TOL_BOUNDARY, generic)
        return bool(out) if out.ndim == 0 else out


def ep_domain_perturbed(t_d: float, extent: float = 1.5, n_points: int = 201) -> EPDomain:
    """EP-existence domain for extra hopping ``t_d``.

    At ``t_d = 0`` the domain is the Broken region plus its boundary.
    """
    t_d = float(t_d)
    g = np.linspace(-extent, extent, n_points)
    half = 1.0 + 0.5 * t_d
    boundaries = {
        "k_pi_plus": np.column_stack([g - 0.5 * t_d, g]),
        "k_pi_minus": np.column_stack([-g - 0.5 * t_d, g]),
        "k_zero_upper": np.column_stack([g, np.full_like(g, abs(half))]),
        "k_zero_lower": np.column_stack([g, np.full_like(g, -abs(half))]),
    }
    annotations = {
        "delta_w_zero": 1.0,
        "delta_v_zero": -(1.0 + t_d),
        "gamma_over_2j_type1": abs(half),
    }
    return EPDomain(t_d, boundaries, annotations)
