"""Property-based checks of the structural invariants."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nhrm.core_algebra import eig2, principal_sqrt
from nhrm.ep_finder import PhaseRegion, classify_phase, locate_eps
from nhrm.field import auxiliary_b, circle_loop, field_f, winding_number
from nhrm.lattice import (
    Chain,
    HoppingPerturbed,
    ModelParams,
    PotentialPerturbed,
    build_bloch,
)
from nhrm.spectrum import PointClass, band_pair, classify_point, eps_squared
from nhrm.symmetry import qx_expectation, symmetry_defect

finite = st.floats(-1e6, 1e6, allow_nan=False)
angle = st.floats(-math.pi, math.pi)
delta_s = st.floats(-1.4, 1.4)
gamma_s = st.floats(0.0, 3.0)


@given(finite, finite)
def test_principal_sqrt_squares_back(re, im):
    z = complex(re, im)
    r = principal_sqrt(z)
    assert r.real >= 0
    assert abs(r * r - z) <= 1e-15 * abs(z) + 1e-300
    if im == 0 and re < 0:
        assert r.real == 0 and r.imag > 0


@given(st.lists(st.floats(-10, 10), min_size=8, max_size=8))
def test_eig2_trace_det(xs):
    m = np.array(xs[:4]).reshape(2, 2) + 1j * np.array(xs[4:]).reshape(2, 2)
    r = eig2(m)
    scale = max(np.linalg.norm(m), 1e-300)
    assert abs(r.lambda_plus + r.lambda_minus - np.trace(m)) <= 1e-12 * scale
    if not r.defective:
        assert abs(r.lambda_plus * r.lambda_minus - np.linalg.det(m)) <= 1e-12 * scale ** 2


@given(delta_s, gamma_s, st.floats(-2, 2), angle, angle)
def test_b_squared_is_eps_squared(d, gm, g, kx, ky):
    p = ModelParams(delta=d, gamma=gm, g=g)
    b = auxiliary_b(p, (kx, ky))
    assert abs(np.sum(b * b) - eps_squared(p, (kx, ky))) <= 1e-12 * p.energy_scale ** 2


@given(delta_s, gamma_s, st.floats(-2, 2), angle, angle)
def test_field_is_real(d, gm, g, kx, ky):
    s = field_f(ModelParams(delta=d, gamma=gm, g=g), (kx, ky))
    assert np.all(np.isfinite(s.f))


@given(delta_s, gamma_s, st.floats(-2, 2), angle, angle)
def test_bloch_periodic_and_transposed(d, gm, g, kx, ky):
    p = ModelParams(delta=d, gamma=gm, g=g)
    h = build_bloch(p, (kx, ky)).matrix
    assert np.allclose(build_bloch(p, (kx + 2 * math.pi, ky - 2 * math.pi)).matrix, h, atol=1e-13)
    assert np.allclose(build_bloch(p, (-kx, ky)).matrix, h.T, atol=1e-15)


@given(delta_s, st.floats(-1.5, 1.5), st.floats(-3, 3).filter(lambda g: abs(g) > 1e-3))
def test_phase_independent_of_g(d, gh, g):
    region = classify_phase(d, gh)
    p = ModelParams(delta=d, gamma=2 * abs(gh), g=g)
    if region is PhaseRegion.BROKEN and abs(abs(d) - 1) > 1e-6:
        assert len(locate_eps(p)) == 4


@given(st.floats(-0.9, 0.9), st.floats(0.05, 2.5), angle)
@settings(max_examples=200)
def test_indicator_is_step(d, gm, kx):
    p = ModelParams(delta=d, gamma=gm, n_chains=1, variant=Chain())
    eps = [r.k_c.kx for r in locate_eps(p)] if abs(1 - d) > 1e-6 else []
    if any(abs(kx - e) < 1e-3 for e in eps):
        return
    cls = classify_point(p, (kx, 0.0))
    if cls is PointClass.EP:
        return
    q = qx_expectation(p, (kx, 0.0))
    assert abs(q - (1.0 if cls is PointClass.REAL_PAIR else 0.0)) <= 1e-8


@given(st.floats(-1, 1), st.floats(0, 2), st.floats(-2, 2), angle)
def test_defects(d, gm, v, kx):
    sym = ModelParams(delta=d, gamma=gm, n_chains=1, variant=HoppingPerturbed(0.2))
    assert symmetry_defect(build_bloch(sym, (kx, 0.0))) <= 1e-14
    pot = ModelParams(delta=d, gamma=gm, n_chains=1, variant=PotentialPerturbed(v))
    assert abs(symmetry_defect(build_bloch(pot, (kx, 0.0))) - 2 * math.sqrt(2) * abs(v)) <= 1e-12


@given(st.floats(-0.9, 0.9), st.floats(0.05, 2.5), angle)
def test_real_or_imaginary_chain_pairs(d, gm, kx):
    p = ModelParams(delta=d, gamma=gm, n_chains=1, variant=Chain())
    e = band_pair(p, (kx, 0.0)).eps
    assert min(abs(e.real), abs(e.imag)) <= 1e-12 * p.energy_scale


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(0.05, 0.6))
@settings(max_examples=60, deadline=None)
def test_winding_quantized_or_rejected(cx, cy, r):
    p = ModelParams()
    eps = [(e.k_c.kx, e.k_c.ky) for e in locate_eps(p)]
    near = min(math.hypot((cx - a + math.pi) % (2 * math.pi) - math.pi,
                          (cy - b + math.pi) % (2 * math.pi) - math.pi) for a, b in eps)
    if abs(near - r) < 1e-3:
        return
    w = winding_number(p, circle_loop((cx, cy), r))
    assert abs(2 * w - round(2 * w)) <= 1e-6
    if near > r:
        assert w == 0
