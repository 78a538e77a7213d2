import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from leemodel.errors import DeltaLimitExcluded, DivergentIntegral, OnShellSingularity, ParameterError
from leemodel.model import Gaussian, Local, SharpCutoff, make_params
from leemodel.propagator import (BelowThreshold, GeneralComplex, ScatteringLimit,
                                 inverse_propagator_bare, inverse_propagator_renormalized,
                                 pair_coefficients, pole_integral_closed_form, renormalized_bracket,
                                 self_energy)
from leemodel.renorm import PhysicalParams
from leemodel.verify import pair_coefficient_residuals, quad_self_energy

SHARP = make_params(1, 1, 2.0, 1.0, SharpCutoff(10.0))


def gaussian_sigma_closed(mu, g0, lam, U):
    """Exponential-integral forms of the Gaussian self-energy (third, independent route)."""
    pref = mu * g0 ** 2 / (2 * math.pi)
    if isinstance(U, ScatteringLimit):
        y = 2 * mu * U.E / lam ** 2
        return complex(-pref * math.exp(-y) * special.expi(y), pref * math.pi * math.exp(-y))
    c = -2 * mu * complex(U) / lam ** 2
    return pref * complex(np.exp(c) * special.exp1(c))


# --- self-energy ----------------------------------------------------------

def test_sharp_below_threshold_example():
    val = self_energy(SHARP, BelowThreshold(-1.0))
    assert val.imag == 0
    assert val.real == pytest.approx(0.5 / (2 * math.pi) * math.log(101), rel=1e-14)
    assert val.real == pytest.approx(0.36726, abs=1e-5)
    assert val.real == pytest.approx(quad_self_energy(SHARP, -1.0).real, rel=1e-10)


@pytest.mark.parametrize("at", [BelowThreshold(-1.0), ScatteringLimit(2.0), GeneralComplex(1 + 1j)])
@pytest.mark.parametrize("ff", [SharpCutoff(3.0), Gaussian(1.0)])
def test_zero_coupling_gives_zero(ff, at):
    assert self_energy(make_params(1, 1, 1, 0.0, ff), at) == 0


def test_scattering_imaginary_part_example():
    # f(k) = 1 for k = sqrt(2) under a cutoff of 10, so Im = mu g0^2 / 2
    val = self_energy(SHARP, ScatteringLimit(2.0))
    assert val.imag == 0.25
    oracle = quad_self_energy(SHARP, 2.0, extrapolate=True)
    assert val.imag == pytest.approx(oracle.imag, rel=1e-8)
    assert val.real == pytest.approx(oracle.real, rel=1e-8)


def test_above_sharp_cutoff_no_absorption():
    val = self_energy(SHARP, ScatteringLimit(150.0))       # k^2 = 150 > 100
    assert val.imag == 0
    assert val.real == pytest.approx(0.5 / (2 * math.pi) * math.log(50 / 150), rel=1e-14)


def test_local_bare_path_diverges():
    p = make_params(1, 1, 1, 1, Local())
    with pytest.raises(DivergentIntegral):
        self_energy(p, BelowThreshold(-1.0))
    with pytest.raises(DivergentIntegral):
        inverse_propagator_bare(p, ScatteringLimit(1.0))


def test_sharp_edge_is_divergent():
    with pytest.raises(DivergentIntegral):
        self_energy(SHARP, ScatteringLimit(100.0))


@pytest.mark.parametrize("at", [BelowThreshold(-1.0), BelowThreshold(-1e-7), BelowThreshold(-300.0),
                                ScatteringLimit(0.01), ScatteringLimit(2.0), ScatteringLimit(60.0),
                                ScatteringLimit(80.0), GeneralComplex(3 + 0.5j), GeneralComplex(-2 - 4j),
                                GeneralComplex(120 + 1j)])
def test_sharp_adaptive_matches_closed(at):
    closed = self_energy(SHARP, at)
    adaptive = self_energy(SHARP, at, method="adaptive")
    assert abs(adaptive - closed) <= 1e-9 * abs(closed)


@pytest.mark.parametrize("lam", [0.7, 2.0, 9.0])
@pytest.mark.parametrize("at", [BelowThreshold(-1.0), BelowThreshold(-1e-6), BelowThreshold(-40.0),
                                ScatteringLimit(0.05), ScatteringLimit(2.0), ScatteringLimit(30.0),
                                GeneralComplex(1.5 + 0.7j), GeneralComplex(-1 + 2j)])
def test_gaussian_matches_exponential_integrals(lam, at):
    mu, g0 = 0.75, 1.3
    p = make_params(1, 3, 0.0, g0, Gaussian(lam))
    val = self_energy(p, at)
    ref = gaussian_sigma_closed(mu, g0, lam, at.U if not isinstance(at, ScatteringLimit) else at)
    assert abs(val - ref) <= 1e-8 * abs(ref)


def test_gaussian_has_no_closed_method():
    with pytest.raises(ValueError):
        self_energy(make_params(1, 1, 0, 1, Gaussian(1.0)), BelowThreshold(-1.0), method="closed")


@pytest.mark.parametrize("ff", [SharpCutoff(4.0), Gaussian(1.5)])
def test_sigma_increasing_below_threshold(ff):
    p = make_params(1, 2, 0.0, 1.7, ff)
    U = -np.geomspace(50, 1e-4, 40)
    sig = np.array([self_energy(p, BelowThreshold(u)).real for u in U])
    assert np.all(np.diff(sig) > 0)
    G = np.array([inverse_propagator_bare(p, BelowThreshold(u)).real for u in U])
    assert np.all(np.diff(G) < 0)


@settings(deadline=None, max_examples=30)
@given(st.floats(-20, 20), st.floats(0.05, 10), st.sampled_from(["sharp", "gauss"]))
def test_schwarz_reflection(re, im, kind):
    ff = SharpCutoff(3.0) if kind == "sharp" else Gaussian(1.2)
    p = make_params(1, 1, 0.0, 1.0, ff)
    U = complex(re, im)
    up = self_energy(p, GeneralComplex(U), method="adaptive")
    dn = self_energy(p, GeneralComplex(U.conjugate()), method="adaptive")
    assert abs(dn - up.conjugate()) <= 1e-9 * abs(up)


def test_scattering_limit_is_upper_half_plane_limit():
    p = make_params(1, 1, 0.0, 1.0, Gaussian(2.0))
    target = self_energy(p, ScatteringLimit(1.5))
    near = self_energy(p, GeneralComplex(1.5 + 1e-7j))
    assert abs(near - target) < 1e-6


# --- bare inverse propagator ----------------------------------------------

def test_free_propagator():
    p = make_params(1, 1, 3.0, 0.0, SharpCutoff(10))
    assert inverse_propagator_bare(p, BelowThreshold(-1.0)) == 4 + 0j


def test_bare_root_at_bound_state():
    # 2 = -E0 + 0.5 ln(1 + 100/E0); independent bisection on the closed form
    def cond(e):
        return 2.0 + e - 0.5 * math.log1p(100 / e)

    lo, hi = 0.1, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if cond(mid) < 0 else (lo, mid)
    E0 = 0.5 * (lo + hi)
    assert E0 == pytest.approx(0.5788, abs=1e-4)
    p = make_params(1, 1, 2.0, math.sqrt(2 * math.pi), SharpCutoff(10))
    assert abs(inverse_propagator_bare(p, BelowThreshold(-E0))) < 1e-12


@pytest.mark.parametrize("ff", [SharpCutoff(10.0), Gaussian(3.0)])
def test_bare_scattering_imaginary_part(ff):
    p = make_params(2, 1, 1.0, 1.4, ff)
    E = 1.3
    k = math.sqrt(2 * p.mu * E)
    f2 = (1.0 if isinstance(ff, SharpCutoff) else math.exp(-k * k / 9.0))
    G = inverse_propagator_bare(p, ScatteringLimit(E))
    assert G.imag == pytest.approx(-p.mu * p.g0_sq * f2 / 2, rel=1e-14)


# --- renormalized ---------------------------------------------------------

PHYS = PhysicalParams(E0=1.0, mu=0.5, g0_sq=4 * math.pi)


def test_renormalized_pole():
    assert inverse_propagator_renormalized(PHYS, BelowThreshold(-1.0)) == 0


def test_renormalized_scattering_example():
    G = inverse_propagator_renormalized(PHYS, ScatteringLimit(1.0))   # k^2 = 2 mu E0
    assert G.real == pytest.approx(-2.0, rel=1e-15)
    assert G.imag == pytest.approx(-math.pi, rel=1e-15)


def test_renormalized_equals_prefactor_times_bracket():
    for at in (BelowThreshold(-0.3), ScatteringLimit(2.7), GeneralComplex(0.4 + 0.9j)):
        G = inverse_propagator_renormalized(PHYS, at)
        B = renormalized_bracket(PHYS, at)
        assert abs(G - PHYS.mu * PHYS.g0_sq / (2 * math.pi) * B) < 1e-13


def test_bracket_difference_finite_vs_delta():
    delta = PhysicalParams(1.0, 0.5, math.inf)
    E = 3.0
    diff = renormalized_bracket(delta, ScatteringLimit(E)) - renormalized_bracket(PHYS, ScatteringLimit(E))
    assert diff == pytest.approx((E + 1.0) * 2 * math.pi / (0.5 * 4 * math.pi), rel=1e-14)


def test_delta_limit_propagator_excluded():
    with pytest.raises(DeltaLimitExcluded):
        inverse_propagator_renormalized(PhysicalParams(1.0, 0.5, math.inf), BelowThreshold(-2.0))


def test_renormalized_branch_continuity():
    # approaching the cut from above reproduces the -i pi branch
    B_lim = renormalized_bracket(PHYS, ScatteringLimit(2.0))
    B_near = renormalized_bracket(PHYS, GeneralComplex(2.0 + 1e-12j))
    assert abs(B_lim - B_near) < 1e-10
    assert B_lim.imag == -math.pi


def test_pole_integral_closed_form_examples():
    v = pole_integral_closed_form(0.5, 1.0, BelowThreshold(-2.0))
    assert v.real == pytest.approx(0.5 / (2 * math.pi) * math.log(0.5) / -1.0, rel=1e-15)
    assert v.real == pytest.approx(0.05516, abs=1e-5)
    assert pole_integral_closed_form(0.5, 1.0, BelowThreshold(-1.0)) == pytest.approx(0.5 / (2 * math.pi))
    near = pole_integral_closed_form(0.5, 1.0, BelowThreshold(-1.0 - 1e-9))
    assert near.real == pytest.approx(0.5 / (2 * math.pi), rel=1e-8)


# --- pair coefficients ----------------------------------------------------

def test_pair_coefficients_free():
    assert pair_coefficients(make_params(1, 1, 1, 0.0, SharpCutoff(10)), 1.0, 2.0) == (0, 0)


def test_pair_coefficients_beyond_cutoff():
    _, g = pair_coefficients(SHARP, 1.0, 12.0)
    assert g == 0


def test_pair_coefficients_satisfy_both_relations():
    res1, res2 = pair_coefficient_residuals(SHARP, 1.0, 2.0)
    assert res1 <= 1e-10
    assert res2 <= 1e-10


@pytest.mark.parametrize("ff", [SharpCutoff(5.0), Gaussian(2.0)])
@pytest.mark.parametrize("k, q", [(0.3, 1.1), (1.7, 0.4), (2.2, 2.5)])
def test_pair_coefficients_relations_param(ff, k, q):
    p = make_params(1, 2.5, 0.7, 1.9, ff)
    res1, res2 = pair_coefficient_residuals(p, k, q)
    assert res1 <= 1e-10 and res2 <= 1e-10


def test_pair_coefficients_array_q():
    q = np.array([0.5, 2.0, 3.0])
    zeta, g = pair_coefficients(SHARP, 1.0, q)
    for qi, gi in zip(q, g):
        assert pair_coefficients(SHARP, 1.0, qi)[1] == pytest.approx(gi, rel=1e-15)
    assert zeta == pair_coefficients(SHARP, 1.0, 0.5)[0]


def test_pair_coefficients_on_shell():
    with pytest.raises(OnShellSingularity):
        pair_coefficients(SHARP, 1.0, 1.0 + 1e-12)


def test_pair_coefficients_local_rejected():
    with pytest.raises(DivergentIntegral):
        pair_coefficients(make_params(1, 1, 1, 1, Local()), 1.0, 2.0)


def test_evaluation_point_validation():
    with pytest.raises(ParameterError):
        BelowThreshold(0.5)
    with pytest.raises(ParameterError):
        ScatteringLimit(-1.0)
    with pytest.raises(ParameterError):
        GeneralComplex(2.0)
