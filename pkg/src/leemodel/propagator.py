"""V-particle self-energy and inverse propagator.

All loop integrals are reduced to the radial variable x = q**2,

    Sigma(U) = (mu g0**2 / 2 pi) * J(2 mu U),    J(z) = int_0^inf F(x) / (x - z) dx,

with F(x) = |f(sqrt x)|**2.  On the scattering side, z = k**2 + i0 and J
splits into a principal value plus i*pi*F(k**2).  The i0 is never a finite
number on this path; finite-epsilon quadrature lives in `leemodel.verify`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Union

import numpy as np
from scipy import integrate

from .errors import (DeltaLimitExcluded, DivergentIntegral, InvalidBoundState,
                     OnShellSingularity, ParameterError, QuadratureFailure)
from .model import Local, ModelParams, SharpCutoff, form_factor, form_factor_sq_x

if TYPE_CHECKING:
    from .renorm import PhysicalParams

QUAD_EPSREL = 1e-10      # target handed to the adaptive integrator
QUAD_ACCEPT = 1e-8       # worst relative error estimate we accept
ON_SHELL_TOL = 1e-9


@dataclass(frozen=True)
class BelowThreshold:
    U: float

    def __post_init__(self):
        if not (self.U < 0):
            raise ParameterError(f"BelowThreshold needs U < 0, got {self.U!r}")


@dataclass(frozen=True)
class ScatteringLimit:
    """U = E + i0 with E > 0 (outgoing-wave side of the cut)."""

    E: float

    def __post_init__(self):
        if not (self.E > 0):
            raise ParameterError(f"ScatteringLimit needs E > 0, got {self.E!r}")


@dataclass(frozen=True)
class GeneralComplex:
    U: complex

    def __post_init__(self):
        if complex(self.U).imag == 0:
            raise ParameterError("GeneralComplex needs a non-zero imaginary part")


EvaluationPoint = Union[BelowThreshold, ScatteringLimit, GeneralComplex]


def energy_of(at: EvaluationPoint) -> complex:
    """The (real part of the) energy U at which `at` evaluates."""
    if isinstance(at, ScatteringLimit):
        return complex(at.E)
    return complex(at.U)


# --------------------------------------------------------------------------
# loop integral J(z)
# --------------------------------------------------------------------------

def _quad(g: Callable[[float], float], a: float, b: float, points=(), epsabs: float = 0.0,
          epsrel: float = QUAD_EPSREL) -> tuple[float, float]:
    if b <= a:
        return 0.0, 0.0
    pts = sorted(p for p in points if a < p < b) or None
    val, err = integrate.quad(g, a, b, epsabs=epsabs, epsrel=epsrel, limit=400, points=pts)
    return val, err


def _quad_tail(h: Callable[[float], float], a: float, scale: float, epsabs: float = 0.0) -> tuple[float, float]:
    """int_a^inf h(x) dx through x = a + scale * tan(t)."""

    def g(t):
        x = a + scale * math.tan(t)
        c = math.cos(t)
        return h(x) * scale / (c * c)

    return _quad(g, 0.0, 0.5 * math.pi, epsabs=epsabs)


def _quad_complex(h, a, b, points=()):
    # a component far smaller than the modulus only needs absolute accuracy
    size, _ = _quad(lambda x: abs(h(x)), a, b, points, epsrel=1e-3)
    floor = 1e-2 * QUAD_EPSREL * size
    re, er = _quad(lambda x: h(x).real, a, b, points, epsabs=floor)
    im, ei = _quad(lambda x: h(x).imag, a, b, points, epsabs=floor)
    return complex(re, im), er + ei


def _quad_tail_complex(h, a, scale):
    size, _ = _quad_tail(lambda x: abs(h(x)), a, scale)
    floor = 1e-2 * QUAD_EPSREL * size
    re, er = _quad_tail(lambda x: h(x).real, a, scale, epsabs=floor)
    im, ei = _quad_tail(lambda x: h(x).imag, a, scale, epsabs=floor)
    return complex(re, im), er + ei


def _check(total: complex, err: float, what: str) -> None:
    if not math.isfinite(err) or err > QUAD_ACCEPT * max(abs(total), 1e-300):
        raise QuadratureFailure(f"{what}: error estimate {err:.3g} exceeds tolerance for value {total:.6g}")


def _require_regulated(params: ModelParams) -> None:
    if isinstance(params.ff, Local):
        raise DivergentIntegral("the bare self-energy diverges for the local form factor; "
                                "use the renormalized inverse propagator")


def _sharp_loop_closed(lam2: float, z_kind: str, z: complex) -> complex:
    if z_kind == "below":
        b = -z.real
        return complex(math.log1p(lam2 / b))
    if z_kind == "scatter":
        x0 = z.real
        if x0 == lam2:
            raise DivergentIntegral("scattering momentum sits exactly on the sharp cutoff")
        return complex(math.log(abs(lam2 - x0) / x0), math.pi if x0 < lam2 else 0.0)
    return cmath.log(lam2 - z) - cmath.log(-z)


def _loop_adaptive(ff, z_kind: str, z: complex) -> complex:
    """J(z) by adaptive Gauss-Kronrod (QUADPACK) on regulated form factors."""
    lam2 = ff.cutoff ** 2
    sharp = isinstance(ff, SharpCutoff)

    def F(x):
        return form_factor_sq_x(ff, x)

    parts: list[tuple[complex, float]] = []
    if z_kind == "below":
        b = -z.real
        lo = min(b, lam2)
        parts.append(_quad(lambda x: F(x) / (x + b), 0.0, lo))
        if b < lam2:
            # log variable on [b, lam2]: integrand becomes a smooth sigmoid
            parts.append(_quad(lambda s: F(math.exp(s)) * math.exp(s) / (math.exp(s) + b),
                               math.log(b), math.log(lam2)))
        if not sharp:
            parts.append(_quad_tail(lambda x: F(x) / (x + b), lam2, lam2))
    elif z_kind == "scatter":
        x0 = z.real
        F0 = F(x0)
        upper = 2.0 * x0 if not sharp else min(2.0 * x0, lam2)

        def subtracted(x):
            d = x - x0
            if d == 0.0:
                h = 1e-6 * x0
                return (F(x0 + h) - F(x0 - h)) / (2 * h)
            return (F(x) - F0) / d

        parts.append(_quad(subtracted, 0.0, upper, points=(x0, lam2)))
        if upper != 2.0 * x0 and F0 != 0.0:
            if upper == x0:
                raise DivergentIntegral("scattering momentum sits exactly on the sharp cutoff")
            parts.append((F0 * math.log(abs(upper - x0) / x0), 0.0))
        if sharp:
            parts.append(_quad(lambda x: 1.0 / (x - x0), upper, lam2))
        else:
            mid = max(upper, lam2)
            parts.append(_quad(lambda x: F(x) / (x - x0), upper, mid))
            parts.append(_quad_tail(lambda x: F(x) / (x - x0), mid, lam2))
        total = sum(p[0] for p in parts)
        err = sum(p[1] for p in parts)
        _check(total, err, "principal value")
        return complex(total, math.pi * F0)
    else:
        def h(x):
            return complex(F(x)) / (x - z)

        x_r = z.real
        start = 0.0
        if x_r > abs(z.imag) and F(x_r) != 0.0:
            # subtract F(x_r) + s (x - x_r) on [0, a] so a pole close to the axis
            # leaves no narrow peak; any s is exact, s ~ F'(x_r) keeps the rest smooth
            a = 2.0 * x_r if not sharp else min(2.0 * x_r, lam2)
            F0 = F(x_r)
            step = 1e-4 * x_r
            s = 0.0 if sharp else (F(x_r + step) - F(x_r - step)) / (2 * step)
            parts.append(_quad_complex(lambda x: complex(F(x) - F0 - s * (x - x_r)) / (x - z),
                                       0.0, a, (x_r, lam2)))
            log_span = cmath.log(a - z) - cmath.log(-z)
            parts.append((F0 * log_span + s * (a + (z - x_r) * log_span), 0.0))
            start = a
        if sharp:
            parts.append(_quad_complex(h, start, lam2, (x_r,)))
        else:
            mid = max(start, lam2)
            parts.append(_quad_complex(h, start, mid, (x_r,)))
            parts.append(_quad_tail_complex(h, mid, lam2))

    total = sum(p[0] for p in parts)
    err = sum(p[1] for p in parts)
    _check(total, err, "self-energy")
    return complex(total)


def _classify(params: ModelParams, at: EvaluationPoint) -> tuple[str, complex]:
    mu = params.mu
    if isinstance(at, BelowThreshold):
        return "below", complex(2 * mu * at.U)
    if isinstance(at, ScatteringLimit):
        return "scatter", complex(2 * mu * at.E)
    if isinstance(at, GeneralComplex):
        return "complex", 2 * mu * complex(at.U)
    raise TypeError(f"not an evaluation point: {at!r}")


def loop_integral(params: ModelParams, at: EvaluationPoint, method: str = "auto") -> complex:
    """J(2 mu U) for a regulated form factor.

    ``method`` is ``"auto"`` (closed form where one exists, else adaptive),
    ``"closed"`` or ``"adaptive"``.
    """
    _require_regulated(params)
    kind, z = _classify(params, at)
    ff = params.ff
    if method not in ("auto", "closed", "adaptive"):
        raise ValueError(f"unknown method {method!r}")
    if isinstance(ff, SharpCutoff) and method in ("auto", "closed"):
        return _sharp_loop_closed(ff.cutoff ** 2, kind, z)
    if method == "closed":
        raise ValueError(f"no closed form wired in for {type(ff).__name__}")
    return _loop_adaptive(ff, kind, z)


def self_energy(params: ModelParams, at: EvaluationPoint, method: str = "auto") -> complex:
    """Sigma(U) = g0**2 int d^2q/(2pi)^2 2 mu |f|^2 / (q^2 - 2 mu U).

    Below threshold the result is real.  At a `ScatteringLimit` the
    imaginary part is exactly ``mu g0**2 f(k)**2 / 2``.
    """
    if params.g0 == 0:
        _require_regulated(params)
        return 0j
    pref = params.mu * params.g0_sq / (2 * math.pi)
    J = loop_integral(params, at, method)
    if isinstance(at, ScatteringLimit):
        k = math.sqrt(2 * params.mu * at.E)
        return complex(pref * J.real, 0.5 * params.mu * params.g0_sq * form_factor(params.ff, k) ** 2)
    if isinstance(at, BelowThreshold):
        return complex(pref * J.real)
    return pref * J


def inverse_propagator_bare(params: ModelParams, at: EvaluationPoint, method: str = "auto") -> complex:
    """G_V^{-1}(U) = U0 - U - Sigma(U)."""
    return params.U0 - energy_of(at) - self_energy(params, at, method)


# --------------------------------------------------------------------------
# renormalized (local-limit) forms
# --------------------------------------------------------------------------

def _log_minus_u_over_e0(E0: float, at: EvaluationPoint) -> complex:
    """log(-U / E0) with the outgoing-wave branch (-U = -E - i0 -> arg -pi)."""
    if isinstance(at, ScatteringLimit):
        return complex(math.log(at.E / E0), -math.pi)
    if isinstance(at, BelowThreshold):
        return complex(math.log(-at.U / E0))
    return cmath.log(-complex(at.U) / E0)


def pole_integral_closed_form(mu: float, E0: float, at: EvaluationPoint) -> complex:
    """Closed form of int d^2q/(2pi)^2 (2mu)^2 / ((q^2 - 2mu U)(q^2 + 2mu E0)).

    Equals (mu / 2pi) * ln(E0 / (-U)) / (U + E0), continued to mu/(2 pi E0)
    at the coincident pole U = -E0.
    """
    if not E0 > 0:
        raise InvalidBoundState(f"E0 must be positive, got {E0!r}")
    d = energy_of(at) + E0
    if isinstance(at, BelowThreshold):
        if d == 0:
            return complex(mu / (2 * math.pi * E0))
        # log1p form is stable near the coincident pole
        return complex(mu / (2 * math.pi) * (-math.log1p(-d.real / E0)) / d.real)
    return mu / (2 * math.pi) * (-_log_minus_u_over_e0(E0, at)) / d


def renormalized_bracket(phys: "PhysicalParams", at: EvaluationPoint) -> complex:
    """ln(-U/E0) - (U + E0) / (mu g0**2 / 2 pi).

    This is G_V^{-1} divided by mu g0**2 / 2 pi; it stays finite in the delta
    limit, where the second term drops.  At a scattering point it is
    ``ln(k**2 / 2 mu E0) - i pi - (E + E0)/(mu g0**2/2pi)``.
    """
    if not phys.E0 > 0:
        raise InvalidBoundState(f"E0 must be positive, got {phys.E0!r}")
    lg = _log_minus_u_over_e0(phys.E0, at)
    if math.isinf(phys.g0_sq):
        return lg
    return lg - (energy_of(at) + phys.E0) * 2 * math.pi / (phys.mu * phys.g0_sq)


def inverse_propagator_renormalized(phys: "PhysicalParams", at: EvaluationPoint) -> complex:
    """G_V^{-1}(U) = -(U + E0) [1 + g0**2 I(U)] with the local-limit pole integral I.

    Vanishes identically at U = -E0.  Infinite in the delta limit, which is
    rejected with `DeltaLimitExcluded`; use `renormalized_bracket` there.
    """
    if not phys.E0 > 0:
        raise InvalidBoundState(f"E0 must be positive, got {phys.E0!r}")
    if math.isinf(phys.g0_sq):
        raise DeltaLimitExcluded("G_V^-1 is infinite at g0 = infinity")
    d = energy_of(at) + phys.E0
    val = -d * (1 + phys.g0_sq * pole_integral_closed_form(phys.mu, phys.E0, at))
    if isinstance(at, BelowThreshold):
        return complex(val.real)
    return val


# --------------------------------------------------------------------------
# eigenstate coefficients
# --------------------------------------------------------------------------

def pair_coefficients(params: ModelParams, k: float, q):
    """Coefficients (zeta, g(q)) of the outgoing N-theta eigenstate.

    ``zeta`` is the V admixture and ``g(q)`` the scattered-wave amplitude.
    ``q`` may be an array; the propagator is evaluated once.

    Returns
    -------
    zeta : complex
    g_of_q : complex or ndarray of complex
    """
    _require_regulated(params)
    if not k > 0:
        raise ParameterError(f"k must be positive, got {k!r}")
    q_arr = np.asarray(q, dtype=float)
    if np.any(np.abs(q_arr - k) < ON_SHELL_TOL * max(1.0, k)):
        raise OnShellSingularity(f"q is on shell (q = k = {k})")
    if params.g0 == 0:
        zero = np.zeros_like(q_arr, dtype=complex)
        return 0j, (complex(zero) if zero.ndim == 0 else zero)
    mu = params.mu
    E = k * k / (2 * mu)
    G = inverse_propagator_bare(params, ScatteringLimit(E))
    c = params.g0 / (2 * math.pi)
    fk = form_factor(params.ff, k)
    fq = form_factor(params.ff, q_arr)
    zeta = c * fk / G
    g_of_q = c * c * fq * fk / ((q_arr ** 2 - k * k) / (2 * mu) * G)
    if np.ndim(g_of_q) == 0:
        g_of_q = complex(g_of_q)
    return complex(zeta), g_of_q
