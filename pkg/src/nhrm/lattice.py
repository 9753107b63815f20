"""Model parameters, Bloch matrices, real-space Hamiltonians and k-grids.

Conventions
-----------
Hopping amplitudes carry the factor ``J``; the gain/loss ``gamma``, the
inter-chain tunnelling ``g`` and the staggered potential ``v_pot`` are absolute
energies.  With ``J = 1`` this is the usual dimensionless model.

Every Bloch matrix has the form::

    h(k) = [[-D,        -J conj(q)],
            [-J q,       D        ]]

    D = V_k + v_pot + i gamma,   V_k = 2 g cos(ky)
    q = (1 - delta) + (1 + delta + t_d) exp(i kx)

so that ``eps^2 = J^2 |q|^2 + D^2``.  Sub-lattice A sits on odd sites and
carries ``-i gamma``; B (even sites) carries ``+i gamma``.  The inter-chain
term is ``-g`` on A and ``+g`` on B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Union

import numpy as np

from .exceptions import ParameterError, SizeGuardError

MAX_DENSE_DIM = 4096

PERIODIC = "periodic"
OPEN = "open"


@dataclass(frozen=True)
class Base2D:
    """Coupled chains, two-dimensional Brillouin zone."""

    name = "base2d"


@dataclass(frozen=True)
class Chain:
    """A single dimerized chain; ``g`` and ``ky`` are ignored."""

    name = "chain"


@dataclass(frozen=True)
class HoppingPerturbed:
    """Extra hopping ``t_d`` (in units of J) added to the inter-cell bond."""

    t_d: float = 0.0
    name = "hopping"


@dataclass(frozen=True)
class PotentialPerturbed:
    """Staggered real potential: ``-v_pot`` on A, ``+v_pot`` on B."""

    v_pot: float = 0.0
    name = "potential"


ModelVariant = Union[Base2D, Chain, HoppingPerturbed, PotentialPerturbed]

VARIANT_NAMES = ("base2d", "chain", "hopping", "potential")


def make_variant(name: str, t_d: float = 0.0, v_pot: float = 0.0) -> ModelVariant:
    if name == "base2d":
        return Base2D()
    if name == "chain":
        return Chain()
    if name == "hopping":
        return HoppingPerturbed(float(t_d))
    if name == "potential":
        return PotentialPerturbed(float(v_pot))
    raise ParameterError(f"unknown variant {name!r}; choose from {VARIANT_NAMES}", "variant")


class Momentum(NamedTuple):
    kx: float
    ky: float = 0.0


@dataclass(frozen=True)
class ModelParams:
    """All physical and lattice parameters of one model instance.

    The perturbed variants describe a single chain when ``n_chains == 1``
    and a 2D coupled-chain bundle otherwise.
    """

    j: float = 1.0
    delta: float = 1.0 / math.sqrt(2.0)
    gamma: float = math.sqrt(3.0)
    g: float = 1.0
    n_cells: int = 16
    n_chains: int = 16
    boundary_y: str = PERIODIC
    variant: ModelVariant = field(default_factory=Base2D)

    def __post_init__(self):
        for name in ("j", "delta", "gamma", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite", name)
        if not self.j > 0:
            raise ParameterError("j must be positive", "j")
        if self.gamma < 0:
            raise ParameterError("gamma must be non-negative", "gamma")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ParameterError("n_cells must be an integer >= 1", "n_cells")
        if int(self.n_chains) != self.n_chains or self.n_chains < 1:
            raise ParameterError("n_chains must be an integer >= 1", "n_chains")
        if self.boundary_y not in (PERIODIC, OPEN):
            raise ParameterError(f"boundary_y must be {PERIODIC!r} or {OPEN!r}", "boundary_y")
        if not isinstance(self.variant, (Base2D, Chain, HoppingPerturbed, PotentialPerturbed)):
            raise ParameterError("variant must be a ModelVariant", "variant")
        if isinstance(self.variant, Chain) and self.n_chains != 1:
            raise ParameterError("the chain variant requires n_chains = 1", "n_chains")
        if not (math.isfinite(self.t_d) and math.isfinite(self.v_pot)):
            raise ParameterError("perturbation strengths must be finite", "variant")

    @property
    def t_d(self) -> float:
        return self.variant.t_d if isinstance(self.variant, HoppingPerturbed) else 0.0

    @property
    def v_pot(self) -> float:
        return self.variant.v_pot if isinstance(self.variant, PotentialPerturbed) else 0.0

    @property
    def is_chain(self) -> bool:
        """True for one-dimensional models (no ky dependence)."""
        if isinstance(self.variant, Chain):
            return True
        return isinstance(self.variant, (HoppingPerturbed, PotentialPerturbed)) and self.n_chains == 1

    @property
    def w(self) -> float:
        """Intra-cell hopping factor ``1 - delta``."""
        return 1.0 - self.delta

    @property
    def v(self) -> float:
        """Inter-cell hopping factor ``1 + delta + t_d``."""
        return 1.0 + self.delta + self.t_d

    @property
    def energy_scale(self) -> float:
        """Rough upper bound on ||h(k)||, used to make tolerances relative."""
        s = self.j * (abs(self.w) + abs(self.v)) + self.gamma + abs(self.v_pot)
        if not self.is_chain:
            s += 2.0 * abs(self.g)
        return s if s > 0 else 1.0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class BlochMatrix:
    matrix: np.ndarray
    k: Momentum


def diag_term(params: ModelParams, k: Momentum) -> complex:
    """``D = V_k + v_pot + i gamma`` (``V_k = 0`` for one-dimensional models)."""
    vk = 0.0 if params.is_chain else 2.0 * params.g * math.cos(k[1])
    return complex(vk + params.v_pot, params.gamma)


def offdiag_term(params: ModelParams, k: Momentum) -> complex:
    """``q = w + v exp(i kx)``; the Bloch matrix holds ``-J q`` and ``-J conj(q)``."""
    return params.w + params.v * complex(math.cos(k[0]), math.sin(k[0]))


def offdiag_norm2(params: ModelParams, kx: float) -> float:
    """``|q|^2 = w^2 + v^2 + 2 w v cos kx`` without complex round-off."""
    w, v = params.w, params.v
    return w * w + v * v + 2.0 * w * v * math.cos(kx)


def build_bloch(params: ModelParams, k, *, ky_dependent: bool = False) -> BlochMatrix:
    """2x2 Bloch matrix at momentum ``k``.

    ``ky_dependent=True`` declares that the caller needs a genuine ky
    dependence, which a one-dimensional model cannot provide.
    """
    k = Momentum(*k) if not isinstance(k, Momentum) else k
    if ky_dependent and params.is_chain:
        raise ParameterError("a one-dimensional model has no ky dependence", "variant")
    d = diag_term(params, k)
    jq = params.j * offdiag_term(params, k)
    h = np.array([[-d, -jq.conjugate()], [-jq, d]], dtype=complex)
    return BlochMatrix(h, k)


def _site_index(l: int, n: int, n_sites: int) -> int:
    # l in 1..2N, n in 1..M (both 1-based)
    return (n - 1) * n_sites + (l - 1)


def realspace_dim(params: ModelParams) -> int:
    return 2 * params.n_cells * (1 if params.is_chain else params.n_chains)


def build_realspace(params: ModelParams) -> np.ndarray:
    """Dense real-space Hamiltonian of dimension ``2 N M``.

    x is always periodic; y wraps only for ``boundary_y == "periodic"``.
    Bonds are accumulated, so tiny rings (N = 1, M = 1, 2) pick up the
    multiple couplings implied by the periodic identification.
    """
    dim = realspace_dim(params)
    if dim > MAX_DENSE_DIM:
        raise SizeGuardError(f"dense dimension {dim} exceeds {MAX_DENSE_DIM}", "n_cells")
    n_sites = 2 * params.n_cells
    n_chains = 1 if params.is_chain else params.n_chains
    j, delta, t_d = params.j, params.delta, params.t_d
    h = np.zeros((dim, dim), dtype=complex)

    for n in range(1, n_chains + 1):
        for l in range(1, n_sites + 1):
            sign = -1.0 if l % 2 else 1.0
            i = _site_index(l, n, n_sites)
            h[i, i] += complex(sign * params.v_pot, sign * params.gamma)

            lp = l % n_sites + 1
            t = -j * (1.0 + sign * delta)
            if l % 2 == 0:
                t -= j * t_d  # extra hopping rides on the B(l) -> A(l+1) bond
            ip = _site_index(lp, n, n_sites)
            h[i, ip] += t
            h[ip, i] += t

            if not params.is_chain and (n < n_chains or params.boundary_y == PERIODIC):
                npr = n % n_chains + 1
                inn = _site_index(l, npr, n_sites)
                h[i, inn] += sign * params.g
                h[inn, i] += sign * params.g
    return h


def canonical_angle(k: float) -> float:
    """Map an angle into ``[-pi, pi)``."""
    r = math.fmod(k + math.pi, 2.0 * math.pi)
    if r < 0:
        r += 2.0 * math.pi
    r -= math.pi
    return -math.pi if r >= math.pi else r


def periodic_momenta(n: int) -> List[float]:
    """Allowed momenta ``2 pi m / n`` of an n-site ring, sorted in ``[-pi, pi)``.

    For even ``n`` this is exactly ``{2 pi m / n - pi : m = 0..n-1}``.
    """
    if n % 2 == 0:
        return [2.0 * math.pi * m / n - math.pi for m in range(n)]
    return sorted(canonical_angle(2.0 * math.pi * m / n) for m in range(n))


def open_momenta(n: int) -> List[float]:
    """Standing-wave momenta ``pi m / (n + 1)``, ``m = 1..n``."""
    return [math.pi * m / (n + 1) for m in range(1, n + 1)]


def momentum_grid(params: ModelParams) -> List[Momentum]:
    """Momenta of the finite lattice, ordered with kx fastest."""
    kxs = periodic_momenta(params.n_cells)
    if params.is_chain:
        return [Momentum(kx, 0.0) for kx in kxs]
    if params.boundary_y == PERIODIC:
        kys = periodic_momenta(params.n_chains)
    else:
        kys = open_momenta(params.n_chains)
    return [Momentum(kx, ky) for ky in kys for kx in kxs]
