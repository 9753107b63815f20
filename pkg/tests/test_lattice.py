import math

import numpy as np
import pytest

from nhrm.exceptions import ParameterError, SizeGuardError
from nhrm.lattice import (
    Base2D,
    Chain,
    HoppingPerturbed,
    ModelParams,
    Momentum,
    PotentialPerturbed,
    build_bloch,
    build_realspace,
    canonical_angle,
    momentum_grid,
    open_momenta,
    periodic_momenta,
)
from nhrm.oracle import dense_spectrum

R2, R3 = 1 / math.sqrt(2), math.sqrt(3)


def test_chain_bloch_at_zero(chain):
    h = build_bloch(chain, (0.0, 0.0)).matrix
    assert np.allclose(h, [[-1j, -2], [-2, 1j]], atol=1e-15)


def test_base2d_bloch_at_pi(four_ep):
    h = build_bloch(four_ep, (math.pi, math.pi / 2)).matrix
    assert np.allclose(h, [[-1j * R3, math.sqrt(2)], [math.sqrt(2), 1j * R3]], atol=1e-15)


def test_potential_diagonal():
    p = ModelParams(delta=0.0, gamma=1.0, n_chains=1, variant=PotentialPerturbed(0.3))
    h = build_bloch(p, (1.0, 0.0)).matrix
    assert h[0, 0] == pytest.approx(-(0.3 + 1j))
    assert h[1, 1] == pytest.approx(0.3 + 1j)


def test_ky_dependence_rejected_for_chain(chain):
    with pytest.raises(ParameterError):
        build_bloch(chain, (0.0, 0.0), ky_dependent=True)


def test_uniform_ring_spectrum():
    p = ModelParams(delta=0.0, gamma=0.0, n_cells=2, n_chains=1, variant=Chain())
    ev = dense_spectrum(build_realspace(p))
    assert np.allclose(ev, [-2, 0, 0, 2], atol=1e-14)


def test_realspace_dimension():
    assert build_realspace(ModelParams(n_cells=4, n_chains=2)).shape == (16, 16)


def test_open_y_drops_wrap():
    p = ModelParams(n_cells=2, n_chains=3, boundary_y="open")
    h = build_realspace(p)
    block = h[0:4, 8:12]
    assert np.all(block == 0)
    closed = build_realspace(p.with_(boundary_y="periodic"))
    assert np.any(closed[0:4, 8:12] != 0)


def test_size_guard():
    with pytest.raises(SizeGuardError):
        build_realspace(ModelParams(n_cells=65, n_chains=32))


def test_grids():
    assert periodic_momenta(4) == [-math.pi, -math.pi / 2, 0.0, math.pi / 2]
    assert np.allclose(open_momenta(3), [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    g = momentum_grid(ModelParams(n_cells=4, n_chains=1, variant=Chain()))
    assert [k.kx for k in g] == periodic_momenta(4)
    assert g[0] == Momentum(-math.pi, 0.0)


def test_grid_single_cell_is_gamma_point():
    # A one-cell ring only admits e^{ik} = 1.
    assert momentum_grid(ModelParams(n_cells=1, n_chains=1)) == [Momentum(0.0, 0.0)]


def test_odd_grid_is_periodic():
    for n in (3, 5, 7):
        ks = np.array(periodic_momenta(n))
        assert np.allclose(np.exp(1j * n * ks), 1.0, atol=1e-12)
        assert np.all((ks >= -math.pi) & (ks < math.pi))


def test_grid_order_kx_fastest():
    g = momentum_grid(ModelParams(n_cells=2, n_chains=2))
    assert [tuple(k) for k in g] == [(-math.pi, -math.pi), (0.0, -math.pi), (-math.pi, 0.0), (0.0, 0.0)]


@pytest.mark.parametrize("k", [(0.3, -1.2), (2.9, 0.4), (-1.0, 3.0)])
def test_periodicity(four_ep, k):
    h0 = build_bloch(four_ep, k).matrix
    for shift in [(2 * math.pi, 0), (0, 2 * math.pi), (-2 * math.pi, 2 * math.pi)]:
        h1 = build_bloch(four_ep, (k[0] + shift[0], k[1] + shift[1])).matrix
        assert np.allclose(h0, h1, atol=1e-14)


def test_hermitian_limit():
    for variant in (Base2D(), HoppingPerturbed(0.3)):
        p = ModelParams(gamma=0.0, delta=0.2, variant=variant)
        h = build_bloch(p, (0.7, -0.4)).matrix
        assert np.array_equal(h, h.conj().T)
        r = build_realspace(p.with_(n_cells=3, n_chains=2))
        assert np.array_equal(r, r.conj().T)


def test_transpose_structure(four_ep):
    h = build_bloch(four_ep, (0.9, 0.4)).matrix
    hm = build_bloch(four_ep, (-0.9, 0.4)).matrix
    assert np.allclose(hm, h.T, atol=1e-15)


def test_canonical_angle():
    assert canonical_angle(math.pi) == -math.pi
    assert canonical_angle(-math.pi) == -math.pi
    assert canonical_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


@pytest.mark.parametrize("kwargs, field", [
    ({"j": 0.0}, "j"),
    ({"gamma": -1.0}, "gamma"),
    ({"n_cells": 0}, "n_cells"),
    ({"n_chains": 2, "variant": Chain()}, "n_chains"),
    ({"boundary_y": "twisted"}, "boundary_y"),
    ({"delta": float("nan")}, "delta"),
])
def test_param_validation(kwargs, field):
    with pytest.raises(ParameterError) as exc:
        ModelParams(**kwargs)
    assert exc.value.field == field


def test_perturbed_variants_chain_like_only_when_single():
    assert ModelParams(n_chains=1, variant=HoppingPerturbed(0.1)).is_chain
    assert not ModelParams(n_chains=4, variant=HoppingPerturbed(0.1)).is_chain
