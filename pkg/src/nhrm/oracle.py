"""Brute-force checks: dense diagonalization against the Bloch bands."""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize

from .ep_finder import newton_refine
from .exceptions import ParameterError, SizeGuardError, SpectrumConvergenceError
from .lattice import (
    MAX_DENSE_DIM,
    ModelParams,
    Momentum,
    build_realspace,
    canonical_angle,
    momentum_grid,
)
from .spectrum import band_pair, eps_squared, eps_squared_grad

TOL_MATCH = 1e-10


@dataclass(frozen=True)
class CrosscheckReport:
    max_pairing_distance: float
    matched: bool
    n_levels: int
    params: dict


def dense_spectrum(h) -> np.ndarray:
    """All eigenvalues of a general complex matrix, sorted by (Re, Im)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] > MAX_DENSE_DIM:
        raise SizeGuardError(f"dimension {h.shape[0]} exceeds {MAX_DENSE_DIM}", "n_cells")
    try:
        ev = np.linalg.eigvals(h)
    except np.linalg.LinAlgError as exc:
        digest = hashlib.sha256(np.ascontiguousarray(h).tobytes()).hexdigest()
        raise SpectrumConvergenceError(f"eigensolver failed: {exc}", digest) from exc
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def bloch_levels(params: ModelParams) -> np.ndarray:
    """``+/- eps`` at every momentum of the finite lattice."""
    eps = np.array([band_pair(params, k).eps for k in momentum_grid(params)])
    return np.concatenate([-eps, eps])


def _greedy_max_distance(a: np.ndarray, b: np.ndarray) -> float:
    free = np.ones(len(b), dtype=bool)
    worst = 0.0
    for x in a:
        d = np.where(free, np.abs(b - x), np.inf)
        i = int(np.argmin(d))
        free[i] = False
        worst = max(worst, float(d[i]))
    return worst


def _optimal_max_distance(a: np.ndarray, b: np.ndarray) -> float:
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def _params_echo(params: ModelParams) -> dict:
    d = asdict(params)
    d["variant"] = {"name": params.variant.name, **asdict(params.variant)}
    return d


def crosscheck_spectra(params: ModelParams) -> CrosscheckReport:
    """Pair the dense real-space spectrum with the Bloch levels.

    Greedy nearest-level pairing first; an optimal assignment is tried before
    reporting a mismatch.
    """
    dense = dense_spectrum(build_realspace(params))
    bloch = bloch_levels(params)
    tol = TOL_MATCH * params.energy_scale
    dist = _greedy_max_distance(dense, bloch)
    if dist > tol:
        dist = min(dist, _optimal_max_distance(dense, bloch))
    return CrosscheckReport(dist, dist <= tol, len(dense), _params_echo(params))


def _grid(params: ModelParams, grid_n: int):
    ks = -math.pi + 2.0 * math.pi * np.arange(grid_n) / grid_n
    if params.is_chain:
        return ks, np.zeros(1)
    return ks, ks


def eps_squared_grid(params: ModelParams, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
    """Vectorized ``eps^2`` on the outer grid ``ky x kx`` (rows are ky)."""
    kxx, kyy = np.meshgrid(kx, ky)
    w, v = params.w, params.v
    q2 = w * w + v * v + 2.0 * w * v * np.cos(kxx)
    vk = 0.0 if params.is_chain else 2.0 * params.g * np.cos(kyy)
    d = vk + params.v_pot + 1j * params.gamma
    return params.j ** 2 * q2 + d * d


def min_gap_scan(params: ModelParams, grid_n: int = 256) -> Tuple[float, Momentum]:
    """Minimum of ``|eps|`` over a uniform grid, then a local polish.

    The polish tries a Newton root refinement (for a nearby EP) and a
    quasi-Newton minimization of ``|eps^2|^2`` and keeps the better point.
    """
    if grid_n < 16:
        raise ParameterError("grid_n must be >= 16", "grid_n")
    kx, ky = _grid(params, grid_n)
    e2 = np.abs(eps_squared_grid(params, kx, ky))
    iy, ix = np.unravel_index(int(np.argmin(e2)), e2.shape)
    seed = Momentum(float(kx[ix]), float(ky[iy]))

    candidates = [seed, newton_refine(params, seed)]

    def objective(x):
        k = Momentum(x[0], 0.0 if params.is_chain else x[1])
        val = eps_squared(params, k)
        grad = eps_squared_grad(params, k)
        g = 2.0 * (val.conjugate() * grad).real
        return abs(val) ** 2, g if not params.is_chain else np.array([g[0], 0.0])

    res = minimize(objective, np.array([seed.kx, seed.ky]), jac=True, method="BFGS",
                   options={"gtol": 1e-14, "maxiter": 200})
    candidates.append(Momentum(float(res.x[0]), 0.0 if params.is_chain else float(res.x[1])))

    best = min(candidates, key=lambda k: abs(eps_squared(params, k)))
    best = Momentum(canonical_angle(best.kx), 0.0 if params.is_chain else canonical_angle(best.ky))
    return math.sqrt(abs(eps_squared(params, best))), best
