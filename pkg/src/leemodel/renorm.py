"""Bound-state renormalization: trade the bare U0 for the binding energy E0.

The on-shell scheme fixes the zero of the inverse propagator at U = -E0.
The renormalized coupling is defined through the residue of the
amplitude at that pole.  The delta limit is ``g0_sq = math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import optimize

from .errors import (DivergentIntegral, InvalidBoundState, NegativeCoupling, NonPositiveMass,
                     NonPositiveU0, NoRoot, OutOfRange)
from .model import Local, ModelParams
from .propagator import BelowThreshold, inverse_propagator_bare, self_energy

DELTA_LIMIT = math.inf

# bracket search for the bound state
_E_LOW_START = 1e-12
_E_LOW_FLOOR = 1e-300
_E_HIGH_CEIL = 1e300
_ROOT_RTOL = 1e-13


@dataclass(frozen=True)
class PhysicalParams:
    """Renormalized description of the scattering channel.

    ``g0_sq`` may be ``math.inf`` (the delta-function limit).  ``g_sq`` is
    derived once here so every observable sees the same value.
    """

    E0: float
    mu: float
    g0_sq: float
    g_sq: float = field(init=False)

    def __post_init__(self):
        if not (self.E0 > 0 and math.isfinite(self.E0)):
            raise InvalidBoundState(f"E0 must be positive and finite, got {self.E0!r}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise NonPositiveMass(f"mu must be positive and finite, got {self.mu!r}")
        if not (self.g0_sq > 0):
            # g0 = 0 decouples V: no pole, nothing to renormalize
            raise NegativeCoupling(f"g0_sq must be positive, got {self.g0_sq!r}")
        object.__setattr__(self, "g_sq", renormalized_coupling_sq(self.g0_sq, self.mu, self.E0))

    @property
    def delta_limit(self) -> bool:
        return math.isinf(self.g0_sq)


def renormalized_coupling_sq(g0_sq: float, mu: float, E0: float) -> float:
    """g**2 = g0**2 / (1 + mu g0**2 / (2 pi E0)); infinity maps to 2 pi E0 / mu."""
    if not (E0 > 0):
        raise InvalidBoundState(f"E0 must be positive, got {E0!r}")
    if not (mu > 0):
        raise NonPositiveMass(f"mu must be positive, got {mu!r}")
    if not (g0_sq >= 0):
        raise NegativeCoupling(f"g0_sq must be non-negative, got {g0_sq!r}")
    if math.isinf(g0_sq):
        return 2 * math.pi * E0 / mu
    return g0_sq / (1 + mu * g0_sq / (2 * math.pi * E0))


def bare_coupling_sq(g_sq: float, mu: float, E0: float) -> float:
    """Inverse of `renormalized_coupling_sq`.  The supremum 2 pi E0 / mu maps to infinity."""
    if not (E0 > 0):
        raise InvalidBoundState(f"E0 must be positive, got {E0!r}")
    if not (mu > 0):
        raise NonPositiveMass(f"mu must be positive, got {mu!r}")
    if not (g_sq >= 0):
        raise NegativeCoupling(f"g_sq must be non-negative, got {g_sq!r}")
    g_max = 2 * math.pi * E0 / mu
    if g_sq > g_max:
        raise OutOfRange(f"g_sq = {g_sq!r} exceeds 2 pi E0 / mu = {g_max!r}; no bare theory exists")
    if g_sq == g_max:
        return DELTA_LIMIT
    return g_sq / (1 - mu * g_sq / (2 * math.pi * E0))


def bare_internal_energy(E0: float, params: ModelParams) -> float:
    """U0 that puts the bound state at binding energy E0: U0 = -E0 + Sigma(-E0)."""
    if not (E0 > 0):
        raise InvalidBoundState(f"E0 must be positive, got {E0!r}")
    if isinstance(params.ff, Local):
        raise DivergentIntegral("eliminating U0 needs a regulated form factor")
    return -E0 + self_energy(params, BelowThreshold(-E0)).real


def _condition(params: ModelParams, E0: float) -> float:
    # G_V^{-1}(-E0); increasing in E0
    return inverse_propagator_bare(params, BelowThreshold(-E0)).real


def solve_bound_state(params: ModelParams) -> float:
    """Binding energy E0 > 0 with G_V^{-1}(-E0) = 0.

    The condition is strictly increasing in E0, tends to -inf as E0 -> 0+
    (logarithmic divergence of the loop) and to +inf as E0 -> inf, so the
    root is unique.  The bracket starts at [1e-12, 1] and is widened by
    factors of ten before Brent's method refines it.
    """
    if isinstance(params.ff, Local):
        raise DivergentIntegral("the bound-state condition needs a regulated form factor")
    if params.g0 == 0:
        raise NoRoot("g0 = 0: V decouples and the N-theta channel has no pole")

    lo, hi = _E_LOW_START, 1.0
    f_lo = _condition(params, lo)
    while f_lo > 0:
        if lo <= _E_LOW_FLOOR:
            raise NoRoot(f"no sign change above E0 = {lo:g}")
        hi, lo = lo, lo / 10
        f_lo = _condition(params, lo)
    f_hi = _condition(params, hi)
    while f_hi < 0:
        if hi >= _E_HIGH_CEIL:
            raise NoRoot(f"no sign change below E0 = {hi:g}")
        lo, hi = hi, hi * 10
        f_hi = _condition(params, hi)
    if f_hi == 0:
        return hi
    return optimize.brentq(lambda e: _condition(params, e), lo, hi,
                           xtol=1e-300, rtol=_ROOT_RTOL, maxiter=500)


def physical_from_bare(params: ModelParams) -> PhysicalParams:
    """Solve for E0 and return the renormalized parameter set."""
    E0 = solve_bound_state(params)
    return PhysicalParams(E0=E0, mu=params.mu, g0_sq=params.g0_sq)


def contact_lambda(params: ModelParams) -> float:
    """lambda = g0**2 / U0, the coupling held fixed in the contact limit."""
    if not (params.U0 > 0):
        raise NonPositiveU0(f"the contact limit needs U0 > 0, got {params.U0!r}")
    return params.g0_sq / params.U0
