import math

import numpy as np
import pytest
from scipy import special

from leemodel.errors import DegenerateGrid, DivergentIntegral
from leemodel.model import Gaussian, Local, SharpCutoff, make_params
from leemodel.propagator import BelowThreshold, GeneralComplex, ScatteringLimit, pole_integral_closed_form
from leemodel.renorm import DELTA_LIMIT, PhysicalParams
from leemodel.verify import (OracleReport, compare, composite_gauss_legendre,
                             limit_convergence_study, limit_study_rows, pair_coefficient_residuals,
                             pole_slope_check, quad_pole_integral, quad_self_energy,
                             residue_check, richardson_integral, run_suite)

SHARP = make_params(1.0, 1.0, 1.0, 1.0, SharpCutoff(10.0))
GRID = list(np.geomspace(1e2, 1e6, 41))


# -- integrators ------------------------------------------------------------

def test_gauss_legendre_exact_for_low_degree():
    # order 8 integrates degree 15 exactly
    val = composite_gauss_legendre(lambda x: x ** 15, 0.0, 1.0, 1)
    assert val.real == pytest.approx(1 / 16, rel=1e-14)


@pytest.mark.parametrize("g, a, b, exact", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda x: 1 / (1 + x * x), 0.0, 50.0, math.atan(50.0)),
    (np.cos, 0.0, 30.0, math.sin(30.0)),
])
def test_richardson_on_known_integrals(g, a, b, exact):
    assert richardson_integral(g, a, b, tol=1e-12).real == pytest.approx(exact, rel=1e-10)


def test_oracle_error_shrinks_with_tolerance():
    exact = (math.log(101.0), 0.0)
    errs = []
    for tol in (1e-4, 1e-7, 1e-10, 1e-13):
        v = quad_self_energy(SHARP, -1.0, tol=tol) / (SHARP.mu * SHARP.g0_sq / (2 * math.pi))
        errs.append(abs(v - complex(*exact)))
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


# -- self-energy oracle -----------------------------------------------------

def test_sharp_oracle_example():
    assert quad_self_energy(SHARP, -1.0).real == pytest.approx(0.5 / (2 * math.pi) * math.log(101), rel=1e-12)
    assert quad_self_energy(SHARP, -1.0).real == pytest.approx(0.36726, abs=1e-5)


def test_oracle_zero_coupling():
    assert quad_self_energy(make_params(1.0, 1.0, 1.0, 0.0, SharpCutoff(10.0)), -1.0) == 0


def test_oracle_rejects_local():
    with pytest.raises(DivergentIntegral):
        quad_self_energy(make_params(1.0, 1.0, 1.0, 1.0, Local()), -1.0)


def test_epsilon_extrapolated_absorption():
    assert quad_self_energy(SHARP, 2.0, extrapolate=True).imag == pytest.approx(0.25, rel=1e-8)


def test_gaussian_oracle_matches_exponential_integral():
    p = make_params(1.0, 1.0, 1.0, 1.0, Gaussian(2.0))
    c = 2 * p.mu * 1.0 / 4.0
    expected = p.mu / (2 * math.pi) * math.exp(c) * special.exp1(c)
    assert quad_self_energy(p, -1.0).real == pytest.approx(expected, rel=1e-11)


# -- pole integral ----------------------------------------------------------

def test_pole_integral_example():
    val = quad_pole_integral(0.5, 1.0, -2.0)
    assert val.real == pytest.approx(0.5 / (2 * math.pi) * math.log(2.0), rel=1e-11)
    assert val.real == pytest.approx(0.05516, abs=1e-5)


def test_pole_integral_coincident_poles():
    assert quad_pole_integral(0.5, 1.0, -1.0).real == pytest.approx(0.5 / (2 * math.pi), rel=1e-11)


def test_pole_integral_reflection():
    U = complex(1.3, 0.4)
    a = quad_pole_integral(0.5, 1.0, U)
    b = quad_pole_integral(0.5, 1.0, U.conjugate())
    assert b == pytest.approx(a.conjugate(), rel=1e-12)


def test_pole_integral_random_draws():
    rng = np.random.default_rng(7)
    for _ in range(100):
        mu, E0 = 10 ** rng.uniform(-1, 1, 2)
        U = complex(rng.uniform(-5, 5), rng.choice([-1, 1]) * 10 ** rng.uniform(-2, 1))
        closed = pole_integral_closed_form(mu, E0, GeneralComplex(U))
        assert quad_pole_integral(mu, E0, U, tol=1e-11) == pytest.approx(closed, rel=1e-9)


def test_pole_integral_scattering_limit():
    closed = pole_integral_closed_form(0.5, 1.0, ScatteringLimit(2.0))
    assert quad_pole_integral(0.5, 1.0, ScatteringLimit(2.0)) == pytest.approx(closed, rel=1e-6)
    closed = pole_integral_closed_form(0.5, 1.0, BelowThreshold(-3.0))
    assert quad_pole_integral(0.5, 1.0, BelowThreshold(-3.0)) == pytest.approx(closed, rel=1e-11)


# -- residue ----------------------------------------------------------------

def test_residue_example():
    phys = PhysicalParams(1.0, 0.5, 4 * math.pi)
    slope = pole_slope_check(phys, h=1e-5)
    assert slope.passed and slope.value_main.real == pytest.approx(-2.0, rel=1e-6)
    res = residue_check(phys, h=1e-5)
    assert res.passed and res.value_main.real == pytest.approx(1 / (2 * math.pi), rel=1e-6)


def test_residue_free_limit():
    slope = pole_slope_check(PhysicalParams(1.0, 0.5, 1e-10))
    assert slope.value_main.real == pytest.approx(-1.0, rel=1e-6)


def test_delta_limit_is_excluded():
    phys = PhysicalParams(1.0, 0.5, DELTA_LIMIT)
    for report in (residue_check(phys), pole_slope_check(phys)):
        assert report.excluded and not report.passed
        assert "DeltaLimitExcluded" in report.note


# -- pair coefficients ------------------------------------------------------

@pytest.mark.parametrize("ff", [SharpCutoff(10.0), Gaussian(3.0)])
@pytest.mark.parametrize("k, q", [(1.0, 2.0), (0.5, 0.2), (2.0, 7.0)])
def test_pair_coefficient_relations(ff, k, q):
    p = make_params(1.0, 1.0, 1.0, 1.0, ff)
    r1, r2 = pair_coefficient_residuals(p, k, q)
    assert r1 <= 1e-10 and r2 <= 1e-10


# -- limit study ------------------------------------------------------------

@pytest.mark.parametrize("k, slope", [(2.0, 1.0), (0.5, 1.0), (3.0, 1.0), (1.0, 2.0)])
def test_limit_slopes(k, slope):
    assert limit_convergence_study(k, 0.5, 1.0, GRID) == pytest.approx(slope, abs=0.05)


def test_limit_rows_shrink():
    rows, sigma_inf = limit_study_rows(2.0, 0.5, 1.0, GRID)
    diffs = [d for _, _, d in rows]
    assert all(b < a for a, b in zip(diffs, diffs[1:]))
    assert rows[-1][1] == pytest.approx(sigma_inf, rel=1e-4)


@pytest.mark.parametrize("grid", [[1e3], [1e2, 1e2, 1e2], [1e2, 1e4], [0.5, 1e4]])
def test_degenerate_grids(grid):
    with pytest.raises(DegenerateGrid):
        limit_convergence_study(2.0, 0.5, 1.0, grid)


# -- reports ----------------------------------------------------------------

def test_report_invariant():
    assert compare("x", 1.0, 1.0 + 1e-9, 1e-8).passed
    assert not compare("x", 1.0, 1.1, 1e-8).passed
    r = OracleReport("x", 0, 0, 1e-3, 1e-2)
    assert r.passed == (r.rel_error <= r.tolerance)
    d = compare("y", 2 + 1j, 2 + 1j, 0.0, absolute=True).as_dict()
    assert d["passed"] and d["value_main"] == [2.0, 1.0] and d["error_kind"] == "absolute"


def test_suite_passes_by_default():
    reports = run_suite()
    assert len(reports) >= 8
    failed = [r.target for r in reports if not r.passed]
    assert failed == []
    sharp = [r for r in reports if r.target.startswith("self_energy.sharp")]
    assert sharp and all(r.rel_error <= 1e-8 for r in sharp)


def test_suite_honest_under_impossible_tolerance():
    reports = run_suite(tol=1e-16)
    assert any(not r.passed for r in reports)
