"""Independent oracles for every closed form in the package.

The main path integrates with adaptive Gauss-Kronrod and treats i0
analytically.  The oracles here use a different strategy on purpose:

* composite Gauss-Legendre of fixed order on uniform panels, refined by
  panel doubling with Richardson extrapolation;
* a sinh change of variables centred on the (near-)pole, so a finite
  epsilon Lorentzian becomes a smooth integrand;
* three-point polynomial extrapolation epsilon -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DegenerateGrid, DeltaLimitExcluded, ParameterError, QuadratureFailure
from .model import Gaussian, Local, ModelParams, SharpCutoff, form_factor, form_factor_sq_x, make_params
from .propagator import (BelowThreshold, ScatteringLimit, inverse_propagator_bare,
                         inverse_propagator_renormalized, loop_integral,
                         pair_coefficients, pole_integral_closed_form, self_energy)
from .renorm import (PhysicalParams, bare_coupling_sq, bare_internal_energy,
                     renormalized_coupling_sq, solve_bound_state)
from .scattering import differential_cross_section, s_matrix_element, total_cross_section

GL_ORDER = 8
ORACLE_TOL = 1e-12
_MAX_PANELS = 2 ** 15
_GAUSS_TAIL = 50.0           # exp(-50) ~ 2e-22: truncation point in units of cutoff**2
_POLE_TAIL = 1e6             # pole-integral truncation in units of the largest scale
# Lagrange weights extrapolating f(eps), f(eps/2), f(eps/4) to eps = 0
_EPS_WEIGHTS = (1.0 / 3.0, -2.0, 8.0 / 3.0)


@dataclass
class OracleReport:
    target: str
    value_main: complex
    value_oracle: complex
    rel_error: float
    tolerance: float
    passed: bool = field(init=False)
    absolute: bool = False
    excluded: bool = False
    note: str = ""

    def __post_init__(self):
        self.passed = (not self.excluded) and bool(self.rel_error <= self.tolerance)

    def as_dict(self) -> dict:
        def cx(v):
            v = complex(v)
            return [v.real, v.imag]

        return {
            "target": self.target,
            "value_main": cx(self.value_main),
            "value_oracle": cx(self.value_oracle),
            "rel_error": self.rel_error,
            "tolerance": self.tolerance,
            "error_kind": "absolute" if self.absolute else "relative",
            "passed": self.passed,
            "excluded": self.excluded,
            "note": self.note,
        }


def compare(target: str, main, oracle, tol: float, absolute: bool = False, note: str = "") -> OracleReport:
    main, oracle = complex(main), complex(oracle)
    diff = abs(main - oracle)
    if absolute:
        err = diff
    else:
        scale = abs(oracle)
        err = diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)
    return OracleReport(target, main, oracle, float(err), tol, absolute=absolute, note=note)


# --------------------------------------------------------------------------
# fixed-order composite rule
# --------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def composite_gauss_legendre(g: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                             n_panels: int, order: int = GL_ORDER) -> complex:
    """Fixed-order Gauss-Legendre on ``n_panels`` uniform panels; ``g`` is vectorized."""
    nodes, weights = _gl_nodes(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return complex(np.sum(w * g(x)))


def richardson_integral(g, a: float, b: float, tol: float = ORACLE_TOL, order: int = GL_ORDER,
                        n_start: int = 16) -> complex:
    """Integrate by panel doubling with Richardson extrapolation.

    A Gauss-Legendre rule of order p has error O(h**(2p)), so successive
    estimates I_n, I_2n are combined as I_2n + (I_2n - I_n)/(2**(2p) - 1).
    Stops when two successive extrapolants agree to ``tol``.
    """
    factor = 2.0 ** (2 * order) - 1.0
    n = n_start
    prev = composite_gauss_legendre(g, a, b, n, order)
    prev_r = None
    while n < _MAX_PANELS:
        n *= 2
        cur = composite_gauss_legendre(g, a, b, n, order)
        r = cur + (cur - prev) / factor
        if prev_r is not None and abs(r - prev_r) <= tol * max(abs(r), 1e-300):
            return r
        prev, prev_r = cur, r
    raise QuadratureFailure(f"fixed-order rule did not reach tol={tol:g} with {n} panels")


def _sinh_pole_integral(F, z: complex, upper: float, tol: float) -> complex:
    """int_0^upper F(x) / (x - z) dx with x = x_c + w sinh(s) centred on Re z."""
    x_c = max(z.real, 0.0)
    w = abs(z - x_c)
    if w == 0.0:
        raise ParameterError("pole on the integration contour: need Im z != 0 or Re z < 0")
    s_a = math.asinh(-x_c / w)
    s_b = math.asinh((upper - x_c) / w)

    def g(s):
        x = x_c + w * np.sinh(s)
        return F(x) * w * np.cosh(s) / (x - z)

    return richardson_integral(g, s_a, s_b, tol)


# --------------------------------------------------------------------------
# oracles
# --------------------------------------------------------------------------

def _loop_oracle(ff, z: complex, tol: float) -> complex:
    lam2 = ff.cutoff ** 2
    if isinstance(ff, SharpCutoff):
        return _sinh_pole_integral(lambda x: np.ones_like(x), z, lam2, tol)
    upper = max(z.real, 0.0) + _GAUSS_TAIL * lam2
    return _sinh_pole_integral(lambda x: form_factor_sq_x(ff, x), z, upper, tol)


def _auto_epsilon(params: ModelParams, E: float) -> float:
    scales = [E, params.ff.cutoff ** 2 / (2 * params.mu)]
    if isinstance(params.ff, SharpCutoff):
        scales.append(abs(params.ff.cutoff ** 2 / (2 * params.mu) - E))
    return 1e-3 * min(scales)


def quad_self_energy(params: ModelParams, U: complex, epsilon: float = 0.0, tol: float = ORACLE_TOL,
                     extrapolate: bool = False) -> complex:
    """Sigma(U + i epsilon) by direct fixed-order quadrature.

    With ``extrapolate=True`` the values at epsilon, epsilon/2, epsilon/4
    are extrapolated to epsilon -> 0+; ``epsilon=0`` then picks a default
    of 1e-3 times the smallest energy scale in the problem.
    """
    if isinstance(params.ff, Local):
        from .errors import DivergentIntegral
        raise DivergentIntegral("the local self-energy diverges")
    if epsilon < 0:
        raise ParameterError("epsilon must be non-negative")
    if params.g0 == 0:
        return 0j
    pref = params.mu * params.g0_sq / (2 * math.pi)
    U = complex(U)
    if extrapolate:
        eps0 = epsilon if epsilon > 0 else _auto_epsilon(params, U.real)
        vals = [_loop_oracle(params.ff, 2 * params.mu * (U + 1j * eps0 / 2 ** j), tol) for j in range(3)]
        return pref * sum(wt * v for wt, v in zip(_EPS_WEIGHTS, vals))
    return pref * _loop_oracle(params.ff, 2 * params.mu * (U + 1j * epsilon), tol)


def _pole_oracle(mu: float, E0: float, z: complex, tol: float) -> complex:
    b = 2 * mu * E0
    upper = _POLE_TAIL * max(abs(z), b)
    bulk = _sinh_pole_integral(lambda x: 1.0 / (x + b), z, upper, tol)
    d = z + b
    # exact remainder of int_upper^inf dx / ((x - z)(x + b))
    tail = np.log1p(d / (upper - z)) / d if d != 0 else 1.0 / (upper - z)
    return (2 * mu) ** 2 / (4 * math.pi) * (bulk + complex(tail))


def quad_pole_integral(mu: float, E0: float, U, tol: float = ORACLE_TOL) -> complex:
    """Quadrature of int d^2q/(2pi)^2 (2mu)^2 / ((q^2 - 2mu U)(q^2 + 2mu E0)).

    ``U`` is a complex energy off the positive real axis, or a
    `ScatteringLimit`, which is reached by epsilon extrapolation.
    """
    if isinstance(U, ScatteringLimit):
        eps0 = 1e-3 * min(U.E, E0)
        vals = [_pole_oracle(mu, E0, 2 * mu * complex(U.E, eps0 / 2 ** j), tol) for j in range(3)]
        return sum(wt * v for wt, v in zip(_EPS_WEIGHTS, vals))
    if isinstance(U, BelowThreshold):
        U = U.U
    return _pole_oracle(mu, E0, 2 * mu * complex(U), tol)


def _central_slope(phys: PhysicalParams, h: float) -> float:
    E0 = phys.E0
    up = inverse_propagator_renormalized(phys, BelowThreshold(-E0 + h)).real
    dn = inverse_propagator_renormalized(phys, BelowThreshold(-E0 - h)).real
    return (up - dn) / (2 * h)


def pole_slope_check(phys: PhysicalParams, h: float | None = None, tol: float = 1e-6) -> OracleReport:
    """Central-difference dG/dU at the pole against -(1 + mu g0**2 / 2 pi E0)."""
    h = 1e-5 * phys.E0 if h is None else h
    if phys.delta_limit:
        return OracleReport("pole_slope", complex(-math.inf), complex(-math.inf), math.nan, tol,
                            excluded=True, note="DeltaLimitExcluded")
    expected = -(1 + phys.mu * phys.g0_sq / (2 * math.pi * phys.E0))
    return compare("pole_slope", _central_slope(phys, h), expected, tol)


def residue_check(phys: PhysicalParams, h: float | None = None, tol: float = 1e-6) -> OracleReport:
    """Amplitude residue (g0/2pi)**2 / |dG/dU| at U = -E0 against (g/2pi)**2."""
    h = 1e-5 * phys.E0 if h is None else h
    if not (0 < h < phys.E0):
        raise ParameterError("need 0 < h < E0")
    expected = phys.g_sq / (4 * math.pi ** 2)
    if phys.delta_limit:
        return OracleReport("residue", complex(math.nan), expected, math.nan, tol,
                            excluded=True, note="DeltaLimitExcluded: G_V^-1 slope is infinite")
    residue = phys.g0_sq / (4 * math.pi ** 2) / abs(_central_slope(phys, h))
    return compare("residue", residue, expected, tol)


def pair_coefficient_residuals(params: ModelParams, k: float, q: float) -> tuple[float, float]:
    """Relative residuals of the two linear relations fixing (zeta, g(q)).

    Relation 1 (V row) needs int d^2q g(q) f(q) with the outgoing pole; it
    is taken here as a QAWC principal value plus i pi times the residue,
    independent of the subtraction used on the main path.
    """
    mu = params.mu
    c = params.g0 / (2 * math.pi)
    zeta, gq = pair_coefficients(params, k, q)
    fk = form_factor(params.ff, k)
    fq = form_factor(params.ff, q)
    scale2 = abs(c * zeta * fq) or 1.0
    res2 = abs(gq * (q * q - k * k) / (2 * mu) - c * zeta * fq) / scale2
    if params.g0 == 0 or fk == 0.0:
        return abs(zeta) + 0.0, res2
    x0 = k * k
    lam2 = params.ff.cutoff ** 2

    def h(x):
        r = math.sqrt(x)
        if abs(r - k) < 1e-8 * k:
            r = k * (1 + 1e-8)
            x = r * r
        return pair_coefficients(params, k, r)[1] * form_factor(params.ff, r) * (x - x0)

    if isinstance(params.ff, SharpCutoff):
        upper = lam2
        tail = (0.0, 0.0)
    else:
        upper = 2 * x0 + 10 * lam2
        tail = (integrate.quad(lambda x: (h(x) / (x - x0)).real, upper, np.inf, epsabs=0, epsrel=1e-13)[0],
                integrate.quad(lambda x: (h(x) / (x - x0)).imag, upper, np.inf, epsabs=0, epsrel=1e-13)[0])
    pv_re = integrate.quad(lambda x: h(x).real, 0.0, upper, weight="cauchy", wvar=x0,
                           epsabs=0, epsrel=1e-13, limit=200)[0]
    pv_im = integrate.quad(lambda x: h(x).imag, 0.0, upper, weight="cauchy", wvar=x0,
                           epsabs=0, epsrel=1e-13, limit=200)[0]
    d = 1e-6 * x0
    h0 = 0.5 * (h(x0 + d) + h(x0 - d))
    line = complex(pv_re + tail[0], pv_im + tail[1]) + 1j * math.pi * h0
    integral = math.pi * line        # d^2q = pi dx after the angular integral
    E = k * k / (2 * mu)
    lhs = (params.U0 - E) * zeta
    rhs = c * fk + c * integral
    res1 = abs(lhs - rhs) / abs(c * fk)
    return res1, res2


def bare_differential_cross_section(params: ModelParams, k: float) -> float:
    """dsigma/dphi from the regulated bare theory: (2pi)^3 mu^2/k |(g0/2pi)^2 f^2 / G_V^-1|^2."""
    mu = params.mu
    G = inverse_propagator_bare(params, ScatteringLimit(k * k / (2 * mu)))
    fk = form_factor(params.ff, k)
    amp = (params.g0 / (2 * math.pi)) ** 2 * fk * fk / G
    return (2 * math.pi) ** 3 * mu * mu / k * abs(amp) ** 2


# --------------------------------------------------------------------------
# limit study
# --------------------------------------------------------------------------

def limit_study_rows(k: float, mu: float, E0: float, g0sq_grid: Sequence[float]):
    """Rows (g0_sq, sigma, |sigma - sigma_delta|) along a coupling grid."""
    grid = [float(g) for g in g0sq_grid]
    if len(grid) < 2 or len(set(grid)) < 2:
        raise DegenerateGrid("need at least two distinct couplings")
    if min(grid) < 1:
        raise DegenerateGrid("all grid values must be >= 1")
    if math.log10(max(grid) / min(grid)) < 3 - 1e-9:
        raise DegenerateGrid("grid must span at least three decades")
    sigma_inf = total_cross_section(PhysicalParams(E0, mu, math.inf), k)
    rows = []
    for g in grid:
        s = total_cross_section(PhysicalParams(E0, mu, g), k)
        rows.append((g, s, abs(s - sigma_inf)))
    return rows, sigma_inf


def limit_convergence_study(k: float, mu: float, E0: float, g0sq_grid: Sequence[float]) -> float:
    """Least-squares slope of ln|sigma(g0^2) - sigma(inf)| against ln(1/g0^2).

    Slope 1 away from the bound-state shell; slope 2 exactly on it, where
    the first-order term vanishes.
    """
    rows, _ = limit_study_rows(k, mu, E0, g0sq_grid)
    pts = [(math.log(1 / g), math.log(d)) for g, _, d in rows if d > 0]
    if len(pts) < 2:
        raise DegenerateGrid("differences vanish to double precision")
    x, y = np.array(pts).T
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# --------------------------------------------------------------------------
# suite
# --------------------------------------------------------------------------

def run_suite(mu: float = 0.5, E0: float = 1.0, g0_sq: float = 4 * math.pi,
              sharp_cutoff: float = 10.0, gaussian_cutoff: float = 2.0,
              tol: float | None = None) -> list[OracleReport]:
    """Run every oracle cross-check at one parameter point.

    ``tol`` overrides every per-check tolerance.
    """
    if math.isinf(g0_sq):
        g0_sq = 4 * math.pi * E0 / (2 * mu)   # finite coupling needed for pole/residue checks

    def t(default):
        return default if tol is None else tol

    M = m = 2 * mu                              # any masses with this reduced mass
    sharp = make_params(M, m, 1.0, 1.0, SharpCutoff(sharp_cutoff))
    gauss = make_params(M, m, 1.0, 1.0, Gaussian(gaussian_cutoff))
    phys = PhysicalParams(E0, mu, g0_sq)
    reports = []

    U = -E0
    oracle = quad_self_energy(sharp, U)
    reports.append(compare("self_energy.sharp.closed_vs_oracle",
                           self_energy(sharp, BelowThreshold(U)), oracle, t(1e-8)))
    reports.append(compare("self_energy.sharp.adaptive_vs_oracle",
                           self_energy(sharp, BelowThreshold(U), method="adaptive"), oracle, t(1e-8)))
    reports.append(compare("self_energy.gaussian.adaptive_vs_oracle",
                           self_energy(gauss, BelowThreshold(U)), quad_self_energy(gauss, U), t(1e-6)))

    E = 2.0 * E0
    main = self_energy(sharp, ScatteringLimit(E))
    reports.append(compare("self_energy.sharp.im_vs_eps_oracle", main.imag,
                           quad_self_energy(sharp, E, extrapolate=True).imag, t(1e-6)))
    reports.append(compare("self_energy.gaussian.scattering_vs_eps_oracle",
                           self_energy(gauss, ScatteringLimit(E)),
                           quad_self_energy(gauss, E, extrapolate=True), t(1e-6)))

    reports.append(compare("pole_integral.below_vs_quad",
                           pole_integral_closed_form(mu, E0, BelowThreshold(-2 * E0)),
                           quad_pole_integral(mu, E0, -2 * E0), t(1e-8)))
    reports.append(compare("pole_integral.scattering_vs_eps_oracle",
                           pole_integral_closed_form(mu, E0, ScatteringLimit(E)),
                           quad_pole_integral(mu, E0, ScatteringLimit(E)), t(1e-6)))

    reports.append(compare("renormalized_propagator.pole_value",
                           inverse_propagator_renormalized(phys, BelowThreshold(-E0)), 0.0,
                           t(1e-12), absolute=True))
    reports.append(pole_slope_check(phys, tol=t(1e-6)))
    reports.append(residue_check(phys, tol=t(1e-6)))

    back = bare_coupling_sq(renormalized_coupling_sq(g0_sq, mu, E0), mu, E0)
    reports.append(compare("coupling.round_trip", back, g0_sq, t(1e-12)))

    bs = make_params(M, m, 2.0, math.sqrt(2 * math.pi), SharpCutoff(sharp_cutoff))
    E0_bs = solve_bound_state(bs)
    reports.append(compare("bound_state.round_trip_U0", bare_internal_energy(E0_bs, bs), bs.U0, t(1e-9)))

    # cutoff removal: eliminate U0 at a large cutoff and compare with the local-limit form
    big = make_params(M, m, 0.0, math.sqrt(g0_sq), SharpCutoff(1e4 * math.sqrt(2 * mu * E0)))
    big = make_params(M, m, bare_internal_energy(E0, big), math.sqrt(g0_sq), big.ff)
    reports.append(compare("renormalized_propagator.cutoff_removal",
                           inverse_propagator_bare(big, BelowThreshold(-2 * E0)),
                           inverse_propagator_renormalized(phys, BelowThreshold(-2 * E0)), t(1e-6)))
    k = math.sqrt(2 * mu * E)
    reports.append(compare("cross_section.bare_pipeline",
                           bare_differential_cross_section(big, k),
                           differential_cross_section(phys, k), t(1e-6)))

    s0 = s_matrix_element(phys, k)
    reports.append(compare("s_matrix.unitarity", abs(s0), 1.0, t(1e-12), absolute=True))

    grid = np.logspace(2, 6, 41)
    k_off = 2.0 * math.sqrt(2 * mu * E0)
    reports.append(compare("limit_study.slope_off_shell",
                           limit_convergence_study(k_off, mu, E0, grid), 1.0, t(0.05)))
    k_on = math.sqrt(2 * mu * E0)
    reports.append(compare("limit_study.slope_on_shell",
                           limit_convergence_study(k_on, mu, E0, grid), 2.0, t(0.05)))
    return reports
