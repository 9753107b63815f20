"""The real auxiliary field F(k) and its topological charges.

``F = (Bx <sx> + By <sy>, <sz>)`` with expectation values taken in the
Dirac-normalized lower-band state (the eigenvector of ``-eps``).  F is only
defined up to sign where the principal root of ``eps^2`` jumps, so loop
windings track the doubled angle ``arg((Fx + i Fy)^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from .core_algebra import SIGMA_X, SIGMA_Y, SIGMA_Z, principal_sqrt
from .ep_finder import EPRecord, locate_eps
from .exceptions import (
    DegenerateParams,
    InvariantViolation,
    LoopThroughEP,
    NonQuantized,
    ParameterError,
)
from .lattice import (
    Base2D,
    Chain,
    ModelParams,
    Momentum,
    build_bloch,
    diag_term,
    offdiag_term,
)
from .spectrum import PointClass, band_pair, eps_squared_grad

TOL_REAL_F = 1e-12
TOL_ZERO_F = 1e-8
TOL_QUANTIZED = 1e-6
MAX_DEPTH = 20
CHARGE_RADIUS = 0.05
EP_CLEARANCE = 1e-6


@dataclass(frozen=True)
class FieldSample:
    k: Momentum
    b: np.ndarray  # complex (Bx, By, Bz)
    f: np.ndarray  # real (Fx, Fy)
    at_ep: bool


def _as_momentum(k) -> Momentum:
    return k if isinstance(k, Momentum) else Momentum(*k)


def auxiliary_b(params: ModelParams, k) -> np.ndarray:
    """Complex 3-vector B with ``h(k) = B . sigma``; Bx, By are real."""
    k = _as_momentum(k)
    jq = params.j * offdiag_term(params, k)
    return np.array([-jq.real, -jq.imag, -diag_term(params, k)], dtype=complex)


def field_f(params: ModelParams, k) -> FieldSample:
    k = _as_momentum(k)
    b = auxiliary_b(params, k)
    bp = band_pair(params, k)
    if bp.classification is PointClass.EP:
        return FieldSample(k, b, np.zeros(2), True)
    psi = bp.vec_minus
    sx = np.vdot(psi, SIGMA_X @ psi)
    sy = np.vdot(psi, SIGMA_Y @ psi)
    sz = np.vdot(psi, SIGMA_Z @ psi)
    fx = b[0] * sx + b[1] * sy
    f = np.array([fx, sz])
    if np.max(np.abs(f.imag)) > TOL_REAL_F:
        raise InvariantViolation(f"F has imaginary residue {np.max(np.abs(f.imag)):.3e} at k=({float(k[0]):.6g}, {float(k[1]):.6g})")
    return FieldSample(k, b, f.real.copy(), False)


def field_f_closed_form(params: ModelParams, k) -> np.ndarray:
    """F from the closed expressions in eps, V = Re D and gamma (cross-check only)."""
    k = _as_momentum(k)
    bp = band_pair(params, k)
    eps, e2 = bp.eps, bp.eps2
    d = diag_term(params, k)
    vv, gam = d.real, params.gamma
    den = e2 + abs(eps) ** 2 + 2 * gam * eps.imag + 2 * vv * eps.real + 2 * gam ** 2 - 2j * gam * vv
    fx = -2 * (e2 - d * d) * (eps.real + vv) / den
    fy = (abs(eps) ** 2 - e2 + 2 * gam * eps.imag + 2 * vv * eps.real + 2j * gam * vv + 2 * vv ** 2) / den
    return np.array([fx, fy])


@dataclass(frozen=True)
class KLoop:
    """Closed polyline in k-space; counterclockwise is positive."""

    points: np.ndarray  # (n + 1, 2), first row == last row

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or not np.all(np.isfinite(pts)):
            raise ParameterError("loop points must be finite (kx, ky) pairs", "loop")
        if not np.allclose(pts[0], pts[-1], rtol=0, atol=1e-15):
            pts = np.vstack([pts, pts[:1]])
        if len(pts) < 4:
            raise ParameterError("a loop needs at least three distinct (kx, ky) vertices", "loop")
        object.__setattr__(self, "points", pts)


def circle_loop(center, radius: float, n: int = 64) -> KLoop:
    t = np.linspace(0.0, 2.0 * math.pi, n + 1)
    pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
    pts[-1] = pts[0]
    return KLoop(pts)


def polygon_loop(vertices: Sequence[Sequence[float]]) -> KLoop:
    return KLoop(np.asarray(vertices, dtype=float))


def rectangle_loop(kx_range, ky_range, n_per_side: int = 16) -> KLoop:
    (x0, x1), (y0, y1) = kx_range, ky_range
    s = np.linspace(0.0, 1.0, n_per_side, endpoint=False)
    sides = [
        np.column_stack([x0 + (x1 - x0) * s, np.full_like(s, y0)]),
        np.column_stack([np.full_like(s, x1), y0 + (y1 - y0) * s]),
        np.column_stack([x1 - (x1 - x0) * s, np.full_like(s, y1)]),
        np.column_stack([np.full_like(s, x0), y1 - (y1 - y0) * s]),
    ]
    pts = np.vstack(sides + [[[x0, y0]]])
    return KLoop(pts)


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(max(float((p - a) @ ab) / denom, 0.0), 1.0)
    return float(np.linalg.norm(a + t * ab - p))


def _check_clearance(params: ModelParams, loop: KLoop) -> None:
    try:
        eps = locate_eps(params)
    except DegenerateParams:
        return
    if not eps or params.is_chain:
        return
    pts = loop.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    for rec in eps:
        c = np.array([rec.k_c.kx, rec.k_c.ky])
        for sx in range(int(math.floor((lo[0] - c[0]) / (2 * math.pi))),
                        int(math.ceil((hi[0] - c[0]) / (2 * math.pi))) + 1):
            for sy in range(int(math.floor((lo[1] - c[1]) / (2 * math.pi))),
                            int(math.ceil((hi[1] - c[1]) / (2 * math.pi))) + 1):
                p = c + 2 * math.pi * np.array([sx, sy])
                dmin = min(_segment_distance(p, pts[i], pts[i + 1]) for i in range(len(pts) - 1))
                if dmin < EP_CLEARANCE:
                    raise LoopThroughEP(f"loop passes within {dmin:.2e} rad of the EP at ({p[0]:.6g}, {p[1]:.6g})")


def _doubled(params: ModelParams, k) -> complex:
    s = field_f(params, k)
    norm = float(np.hypot(*s.f))
    if s.at_ep or norm < TOL_ZERO_F:
        raise LoopThroughEP(f"|F| = {norm:.2e} on the loop at k=({float(k[0]):.6g}, {float(k[1]):.6g})")
    z = complex(s.f[0], s.f[1]) / norm
    return z * z


def _angle_step(z0: complex, z1: complex) -> float:
    return math.atan2((z1 * z0.conjugate()).imag, (z1 * z0.conjugate()).real)


def winding_number(params: ModelParams, loop: KLoop, max_depth: int = MAX_DEPTH) -> float:
    """Half-integer winding of F around ``loop``.

    Segments whose doubled-angle step exceeds pi/2 are bisected (up to
    ``max_depth`` times).  The result is ``-(total doubled angle)/(4 pi)``.
    """
    _check_clearance(params, loop)
    pts = loop.points
    vals = [_doubled(params, p) for p in pts[:-1]]
    vals.append(vals[0])

    total = 0.0
    for i in range(len(pts) - 1):
        stack = [(pts[i], vals[i], pts[i + 1], vals[i + 1], 0)]
        while stack:
            a, za, b, zb, depth = stack.pop()
            step = _angle_step(za, zb)
            if abs(step) > math.pi / 2:
                if depth >= max_depth:
                    raise NonQuantized(f"doubled angle step {step:.3f} unresolved after {max_depth} bisections")
                m = 0.5 * (a + b)
                zm = _doubled(params, m)
                stack.append((m, zm, b, zb, depth + 1))
                stack.append((a, za, m, zm, depth + 1))
                continue
            total += step
    w = -total / (4.0 * math.pi)
    m = round(2.0 * w)
    if abs(2.0 * w - m) > TOL_QUANTIZED:
        raise NonQuantized(f"winding {w!r} is not a half-integer")
    return m / 2.0


def winding_number_continuation(params: ModelParams, loop: KLoop, samples_per_edge: int = 32) -> float:
    """Debug cross-check: follow one eigenvector by maximal overlap.

    Circling an EP swaps the two eigenvectors, so the loop is traversed twice
    before the tracked state returns; the plain angle of F (no doubling) over
    both passes is divided by two.
    """
    pts = loop.points
    dense = []
    for i in range(len(pts) - 1):
        for s in np.linspace(0.0, 1.0, samples_per_edge, endpoint=False):
            dense.append(pts[i] + s * (pts[i + 1] - pts[i]))
    path = dense + dense + [dense[0]]

    def candidates(k):
        bp = band_pair(params, k)
        if bp.classification is PointClass.EP:
            raise LoopThroughEP(f"EP on the loop at k=({float(k[0]):.6g}, {float(k[1]):.6g})")
        return bp.vec_minus, bp.vec_plus

    psi = candidates(path[0])[0]
    angle = None
    total = 0.0
    for k in path:
        c0, c1 = candidates(k)
        psi = c0 if abs(np.vdot(psi, c0)) >= abs(np.vdot(psi, c1)) else c1
        b0 = auxiliary_b(params, k)
        fx = (b0[0] * np.vdot(psi, SIGMA_X @ psi) + b0[1] * np.vdot(psi, SIGMA_Y @ psi)).real
        fy = np.vdot(psi, SIGMA_Z @ psi).real
        a = math.atan2(fy, fx)
        if angle is not None:
            total += (a - angle + math.pi) % (2 * math.pi) - math.pi
        angle = a
    w = -total / (2.0 * math.pi) / 2.0
    m = round(2.0 * w)
    if abs(2.0 * w - m) > 1e-3:
        raise NonQuantized(f"continuation winding {w!r} is not a half-integer")
    return m / 2.0


def charge_params(params: ModelParams) -> ModelParams:
    """Two-dimensional parent model used to assign charges to chain EPs.

    A chain is the ky = pi/2 line of the coupled model, where ``V_k`` vanishes.
    """
    if not params.is_chain:
        return params
    variant = Base2D() if isinstance(params.variant, Chain) else params.variant
    return replace(params, variant=variant, n_chains=2, g=params.g if params.g != 0 else 1.0)


def assign_charges(params: ModelParams, eps: List[EPRecord], radius: float = CHARGE_RADIUS) -> List[EPRecord]:
    """Fill each record's charge from a small circular winding loop."""
    parent = charge_params(params)
    centers = [np.array([r.k_c.kx, math.pi / 2 if params.is_chain else r.k_c.ky]) for r in eps]
    out = []
    for i, rec in enumerate(eps):
        r = radius
        for j, other in enumerate(centers):
            if j == i:
                continue
            d = centers[i] - other
            d = (d + math.pi) % (2 * math.pi) - math.pi
            r = min(r, 0.4 * float(np.linalg.norm(d)))
        w = winding_number(parent, circle_loop(centers[i], r))
        out.append(rec.with_charge(w))
    return out


def near_ep_asymptote(params: ModelParams, k_c, dk) -> np.ndarray:
    """Leading-order F near a refined EP ``k_c``.

    With ``e = sqrt(grad(eps^2) . dk)`` (principal root),
    ``F ~ (-Re e, Im e / gamma)``.  For the plain model
    ``e^2 = -2 J^2 (1 - delta)(1 + delta) sin(kcx) x - 4 i gamma g sin(kcy) y``.
    """
    k_c = _as_momentum(k_c)
    dk = np.asarray(dk, dtype=float)
    if float(np.linalg.norm(dk)) > 0.01:
        raise ParameterError("the asymptote needs |dk| <= 0.01", "dk")
    if params.gamma == 0:
        raise ParameterError("no EP without gain/loss", "gamma")
    grad = eps_squared_grad(params, k_c)
    e = principal_sqrt(grad[0] * dk[0] + grad[1] * dk[1])
    return np.array([-e.real, e.imag / params.gamma])


@dataclass(frozen=True)
class KinkReport:
    samples: List[FieldSample]
    kink_positions: List[float]


def kink_profile(params: ModelParams, n_samples: int = 256) -> KinkReport:
    """F along ``kx in [-pi, pi)`` for a chain, with the EP (kink) momenta.

    At a phase boundary the two kinks merge into a single touching point.
    """
    if not params.is_chain:
        raise ParameterError("kink profiles are defined for one-dimensional models", "variant")
    if n_samples < 2:
        raise ParameterError("n_samples must be >= 2", "n_samples")
    kxs = -math.pi + 2.0 * math.pi * np.arange(n_samples) / n_samples
    samples = [field_f(params, Momentum(float(kx), 0.0)) for kx in kxs]
    kinks = sorted(r.k_c.kx for r in locate_eps(params))
    return KinkReport(samples, kinks)


def hamiltonian_check(params: ModelParams, k) -> float:
    """||B . sigma - h(k)||_F; zero by construction."""
    b = auxiliary_b(params, k)
    h = b[0] * SIGMA_X + b[1] * SIGMA_Y + b[2] * SIGMA_Z
    return float(np.linalg.norm(h - build_bloch(params, k).matrix))
