import math

import numpy as np
import pytest

from nhrm.ep_finder import locate_eps
from nhrm.exceptions import LoopThroughEP, ParameterError
from nhrm.field import (
    KLoop,
    assign_charges,
    auxiliary_b,
    circle_loop,
    field_f,
    field_f_closed_form,
    hamiltonian_check,
    kink_profile,
    near_ep_asymptote,
    polygon_loop,
    rectangle_loop,
    winding_number,
    winding_number_continuation,
)
from nhrm.lattice import Chain, HoppingPerturbed, ModelParams, Momentum, momentum_grid

R2, R3 = 1 / math.sqrt(2), math.sqrt(3)
HALF = math.pi / 2


def test_auxiliary_b_example():
    p = ModelParams(delta=0.3, gamma=0.5, g=1.0)
    assert np.allclose(auxiliary_b(p, (0.0, 0.0)), [-2, 0, -(2 + 0.5j)], atol=1e-15)


def test_auxiliary_b_hermitian_at_pi():
    p = ModelParams(delta=0.0, gamma=0.0, g=1.0)
    b = auxiliary_b(p, (math.pi, 0.4))
    assert np.allclose(b, [0, 0, -2 * math.cos(0.4)], atol=1e-15)


def test_hamiltonian_decomposition(four_ep):
    for k in [(0.1, 0.2), (3.0, -2.0)]:
        assert hamiltonian_check(four_ep, k) < 1e-15


def test_field_examples(chain, frozen):
    assert np.allclose(field_f(chain, (0.0, 0.0)).f, [-R3, 0.0], atol=1e-14)
    herm = ModelParams(delta=0.0, gamma=0.0, g=1.0)
    assert np.allclose(field_f(herm, (HALF, HALF)).f, [-math.sqrt(2), 0.0], atol=1e-14)
    for d, gm, g, kx, ky, is_chain, want in frozen["fields"]:
        p = ModelParams(delta=d, gamma=gm, g=g, n_chains=1 if is_chain else 16,
                        variant=Chain() if is_chain else ModelParams().variant)
        assert np.allclose(field_f(p, (kx, ky)).f, want, atol=1e-12)


def test_field_at_ep(four_ep):
    s = field_f(four_ep, (HALF, HALF))
    assert s.at_ep
    assert np.array_equal(s.f, [0.0, 0.0])


def test_closed_form_agrees(four_ep):
    rng = np.random.default_rng(7)
    for kx, ky in rng.uniform(-math.pi, math.pi, size=(300, 2)):
        s = field_f(four_ep, (kx, ky))
        assert np.allclose(s.f, field_f_closed_form(four_ep, (kx, ky)), atol=1e-10)


def test_charges_four(four_ep, frozen):
    recs = assign_charges(four_ep, locate_eps(four_ep))
    want = {(round(a, 6), round(b, 6)): round(c * 2) / 2 for a, b, c in frozen["charges_four"]}
    for r in recs:
        assert r.charge == want[(round(r.k_c.kx, 6), round(r.k_c.ky, 6))]
    assert sum(r.charge for r in recs) == 0


def test_charges_pair(pair_ep, frozen):
    recs = assign_charges(pair_ep, locate_eps(pair_ep))
    assert [r.charge for r in recs] == [0.0, 0.0]
    assert all(abs(c) < 1e-6 for _, _, c in frozen["charges_pair"])


def test_chain_charges(chain, frozen):
    recs = assign_charges(chain, locate_eps(chain))
    assert [r.charge for r in recs] == [round(2 * c) / 2 for _, c in frozen["charges_chain"]]


def test_winding_examples(four_ep):
    assert abs(winding_number(four_ep, circle_loop((HALF, HALF), 0.2))) == 0.5
    assert winding_number(four_ep, circle_loop((0.0, 0.0), 0.2)) == 0.0
    pair = rectangle_loop((-2.0, 2.0), (1.2, 2.0))
    assert winding_number(four_ep, pair) == 0.0


def test_winding_additivity(four_ep):
    recs = assign_charges(four_ep, locate_eps(four_ep))
    boxes = [((0.5, 2.5), (0.5, 2.5)), ((-2.5, 2.5), (0.5, 2.5)), ((-2.5, 0.5), (-2.5, 2.5)),
             ((-3.0, 3.0), (-3.0, 3.0))]
    for xr, yr in boxes:
        inside = sum(r.charge for r in recs
                     if xr[0] < r.k_c.kx < xr[1] and yr[0] < r.k_c.ky < yr[1])
        assert winding_number(four_ep, rectangle_loop(xr, yr, 24)) == pytest.approx(inside, abs=1e-6)


def test_brillouin_zone_boundary_is_neutral(four_ep):
    loop = rectangle_loop((-math.pi + 0.01, math.pi - 0.01), (-math.pi + 0.01, math.pi - 0.01), 32)
    assert winding_number(four_ep, loop) == 0.0


def test_orientation_flips_sign(four_ep):
    loop = circle_loop((HALF, HALF), 0.2)
    rev = KLoop(loop.points[::-1])
    assert winding_number(four_ep, rev) == -winding_number(four_ep, loop)


def test_continuation_cross_check(four_ep):
    for c in [(HALF, HALF), (-HALF, HALF), (0.0, 0.0)]:
        loop = circle_loop(c, 0.2)
        assert winding_number_continuation(four_ep, loop) == winding_number(four_ep, loop)


def test_loop_through_ep(four_ep):
    with pytest.raises(LoopThroughEP):
        winding_number(four_ep, polygon_loop([(HALF, HALF), (2.0, HALF), (2.0, 2.0)]))


def test_loop_validation():
    with pytest.raises(ParameterError):
        KLoop(np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_asymptote_examples(four_ep):
    kc = Momentum(HALF, HALF)
    assert np.array_equal(near_ep_asymptote(four_ep, kc, (0.0, 0.0)), [0.0, 0.0])
    with pytest.raises(ParameterError):
        near_ep_asymptote(four_ep, kc, (0.1, 0.0))


def test_asymptote_against_oracle(four_ep, frozen):
    for kx, ky, dx, dy, f_oracle in frozen["near_ep_fields"]:
        a = near_ep_asymptote(four_ep, Momentum(kx, ky), (dx, dy))
        rel = np.linalg.norm(np.array(f_oracle) - a) / np.linalg.norm(a)
        assert rel <= (0.05 if max(abs(dx), abs(dy)) > 5e-4 else 0.005)


def test_field_realness_random():
    rng = np.random.default_rng(8)
    for _ in range(2000):
        p = ModelParams(delta=rng.uniform(-1.5, 1.5), gamma=rng.uniform(0, 3), g=rng.uniform(-2, 2))
        field_f(p, tuple(rng.uniform(-math.pi, math.pi, 2)))  # raises on imaginary residue


def test_projection_on_grid_lines(four_ep):
    finite = four_ep.with_(n_cells=8, n_chains=4)
    for k in momentum_grid(finite):
        assert np.array_equal(field_f(finite, k).f, field_f(four_ep, k).f)


def test_kink_profile(chain):
    rep = kink_profile(chain, 240)
    assert rep.kink_positions == pytest.approx([-2 * math.pi / 3, 2 * math.pi / 3], abs=1e-12)
    for s in rep.samples:
        if abs(s.k.kx) < 2 * math.pi / 3 - 1e-6:
            assert abs(s.f[1]) <= 1e-12
    assert kink_profile(chain.with_(delta=R2, gamma=0.0)).kink_positions == []
    merged = kink_profile(chain.with_(delta=R2, gamma=math.sqrt(2)))
    assert merged.kink_positions == [-math.pi]


def test_kink_needs_chain(four_ep):
    with pytest.raises(ParameterError):
        kink_profile(four_ep)


def test_kinks_come_in_pairs():
    p = ModelParams(delta=0.1, gamma=0.9, n_chains=1, variant=HoppingPerturbed(0.15))
    ks = kink_profile(p, 16).kink_positions
    assert len(ks) == 2 and ks[0] == pytest.approx(-ks[1], abs=1e-12)
