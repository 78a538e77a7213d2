"""On-shell observables of the renormalized model.

Every observable is a function of one complex number, the bracket

    B(k) = L - i pi - c,   L = ln(k**2 / 2 mu E0),   c = (k**2/2mu + E0) / (mu g0**2 / 2pi),

with c = 0 exactly in the delta limit.  The amplitude is isotropic, so
only the m = 0 partial wave scatters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ParameterError
from .propagator import ScatteringLimit, renormalized_bracket
from .renorm import PhysicalParams


@dataclass(frozen=True)
class CrossSectionPoint:
    k: float
    dsigma_dphi: float
    sigma: float
    delta0: float
    s0: complex


def _check_k(k: float) -> None:
    if not (k > 0 and math.isfinite(k)):
        raise ParameterError(f"k must be positive and finite, got {k!r}")


def log_ratio(phys: PhysicalParams, k: float) -> float:
    """L = ln(k**2 / 2 mu E0); zero on the bound-state energy shell k**2 = 2 mu E0."""
    _check_k(k)
    return math.log(k * k / (2 * phys.mu * phys.E0))


def correction_term(phys: PhysicalParams, k: float) -> float:
    """c = (k**2/2mu + E0) * 2pi / (mu g0**2); exactly 0 in the delta limit."""
    _check_k(k)
    if phys.delta_limit:
        return 0.0
    E = k * k / (2 * phys.mu)
    return (E + phys.E0) * 2 * math.pi / (phys.mu * phys.g0_sq)


def bracket(phys: PhysicalParams, k: float) -> complex:
    """B(k), computed from the renormalized inverse propagator at U = k**2/2mu + i0."""
    _check_k(k)
    return renormalized_bracket(phys, ScatteringLimit(k * k / (2 * phys.mu)))


def t_amplitude(phys: PhysicalParams, k: float) -> complex:
    """(g0/2pi)**2 / G_V^{-1}(k**2/2mu + i0) = 1 / (2 pi mu B).

    The g0 dependence cancels between numerator and propagator, so the delta
    limit is the same expression with c = 0.
    """
    return 1.0 / (2 * math.pi * phys.mu * bracket(phys, k))


def differential_cross_section(phys: PhysicalParams, k: float) -> float:
    """dsigma/dphi = (2pi/k) |B|**-2, per unit scattering angle."""
    B = bracket(phys, k)
    return 2 * math.pi / (k * (B.real * B.real + B.imag * B.imag))


def total_cross_section(phys: PhysicalParams, k: float) -> float:
    """sigma = 4 pi**2 / (k [pi**2 + (L - c)**2])."""
    a = log_ratio(phys, k) - correction_term(phys, k)
    return 4 * math.pi ** 2 / (k * (math.pi ** 2 + a * a))


def phase_shift(phys: PhysicalParams, k: float) -> float:
    """s-wave phase shift in (-pi/2, pi/2], with cot(delta0) = (L - c) / pi.

    This is the sign that makes S0 = exp(2 i delta0) equal
    1 + 4 pi**2 i mu T.  The phase is only defined modulo pi; the branch
    around zero keeps full relative precision at both weak and strong
    scattering, where delta0 -> 0 (mod pi).  In the delta limit delta0 -> 0-
    at threshold, i.e. pi modulo pi, as one bound state requires.
    """
    a = log_ratio(phys, k) - correction_term(phys, k)
    if a == 0.0:
        return 0.5 * math.pi
    return math.atan(math.pi / a)


def s_matrix_element(phys: PhysicalParams, k: float) -> complex:
    """S0 = (L - c + i pi) / (L - c - i pi); unimodular by construction."""
    a = log_ratio(phys, k) - correction_term(phys, k)
    return complex(a, math.pi) / complex(a, -math.pi)


def cross_section_point(phys: PhysicalParams, k: float) -> CrossSectionPoint:
    return CrossSectionPoint(
        k=k,
        dsigma_dphi=differential_cross_section(phys, k),
        sigma=total_cross_section(phys, k),
        delta0=phase_shift(phys, k),
        s0=s_matrix_element(phys, k),
    )


def sweep(phys: PhysicalParams, ks: Iterable[float]) -> list[CrossSectionPoint]:
    return [cross_section_point(phys, float(k)) for k in ks]
