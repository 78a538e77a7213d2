"""Parameters of the Galilean Lee model in the N-theta sector.

Units are natural (hbar = 1).  Any self-consistent choice of mass and
energy units works; nothing here converts between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import NegativeCoupling, NonPositiveCutoff, NonPositiveMass, ParameterError


@dataclass(frozen=True)
class MassSpectrum:
    """Masses of N (``M``) and theta (``m``).

    The V mass is fixed by Galilean mass conservation at the vertex,
    ``cal_M = M + m``, and ``mu`` is the reduced mass of the pair.
    """

    M: float
    m: float
    cal_M: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        if not (self.M > 0 and math.isfinite(self.M)):
            raise NonPositiveMass(f"M must be positive and finite, got {self.M!r}")
        if not (self.m > 0 and math.isfinite(self.m)):
            raise NonPositiveMass(f"m must be positive and finite, got {self.m!r}")
        object.__setattr__(self, "cal_M", self.M + self.m)
        object.__setattr__(self, "mu", self.M * self.m / (self.M + self.m))


@dataclass(frozen=True)
class Local:
    """f(omega) = 1: the contact (delta-function) vertex."""

    regulated = False


@dataclass(frozen=True)
class SharpCutoff:
    """f(omega) = 1 for omega < cutoff, 0 otherwise."""

    cutoff: float
    regulated = True

    def __post_init__(self):
        if not (self.cutoff > 0):
            raise NonPositiveCutoff(f"cutoff must be positive, got {self.cutoff!r}")


@dataclass(frozen=True)
class Gaussian:
    """f(omega) = exp(-omega**2 / (2 cutoff**2)), so that f**2 = exp(-omega**2/cutoff**2)."""

    cutoff: float
    regulated = True

    def __post_init__(self):
        if not (self.cutoff > 0):
            raise NonPositiveCutoff(f"cutoff must be positive, got {self.cutoff!r}")


FormFactor = Union[Local, SharpCutoff, Gaussian]


def form_factor(ff: FormFactor, omega):
    """Evaluate f(omega).  Accepts scalars or arrays; all variants have f(0) = 1."""
    omega = np.asarray(omega, dtype=float)
    if isinstance(ff, Local):
        out = np.ones_like(omega)
    elif isinstance(ff, SharpCutoff):
        out = np.where(omega < ff.cutoff, 1.0, 0.0)
    elif isinstance(ff, Gaussian):
        out = np.exp(-0.5 * (omega / ff.cutoff) ** 2)
    else:
        raise TypeError(f"unknown form factor {ff!r}")
    return float(out) if out.ndim == 0 else out


def form_factor_sq_x(ff: FormFactor, x):
    """|f|**2 as a function of x = omega**2, the natural variable of the loop integrals."""
    x = np.asarray(x, dtype=float)
    if isinstance(ff, Local):
        out = np.ones_like(x)
    elif isinstance(ff, SharpCutoff):
        out = np.where(x < ff.cutoff ** 2, 1.0, 0.0)
    elif isinstance(ff, Gaussian):
        out = np.exp(-x / ff.cutoff ** 2)
    else:
        raise TypeError(f"unknown form factor {ff!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BareCouplings:
    U0: float
    g0: float

    def __post_init__(self):
        if not math.isfinite(self.U0):
            raise ParameterError(f"U0 must be finite, got {self.U0!r}")
        if not (self.g0 >= 0 and math.isfinite(self.g0)):
            raise NegativeCoupling(f"g0 must be finite and non-negative, got {self.g0!r}")

    @property
    def g0_sq(self) -> float:
        return self.g0 * self.g0


@dataclass(frozen=True)
class ModelParams:
    masses: MassSpectrum
    couplings: BareCouplings
    ff: FormFactor

    @property
    def mu(self) -> float:
        return self.masses.mu

    @property
    def U0(self) -> float:
        return self.couplings.U0

    @property
    def g0(self) -> float:
        return self.couplings.g0

    @property
    def g0_sq(self) -> float:
        return self.couplings.g0_sq


@dataclass(frozen=True)
class KinematicState:
    """Relative momentum ``k`` and total momentum ``P`` of the N-theta pair."""

    k: float
    P: float = 0.0

    def __post_init__(self):
        if not (self.k > 0):
            raise ParameterError(f"k must be positive, got {self.k!r}")
        if not (self.P >= 0):
            raise ParameterError(f"P must be non-negative, got {self.P!r}")


def make_params(M: float, m: float, U0: float, g0: float, ff: FormFactor = Local()) -> ModelParams:
    """Validate and bundle the bare-theory inputs."""
    if not isinstance(ff, (Local, SharpCutoff, Gaussian)):
        raise ParameterError(f"unknown form factor {ff!r}")
    return ModelParams(MassSpectrum(M, m), BareCouplings(U0, g0), ff)


def total_energy(params: ModelParams, kin: KinematicState) -> float:
    """E = P**2 / (2 cal_M) + k**2 / (2 mu)."""
    ms = params.masses
    return kin.P ** 2 / (2 * ms.cal_M) + kin.k ** 2 / (2 * ms.mu)
