"""Model parameters of the generalized Rabi family and derived quantities.

A single bosonic mode of frequency ``omega`` couples to a two-level system
with splitting ``Omega`` through a rotating-wave coupling ``g1`` and an
anti-rotating coupling ``g2``.  The critical coupling is
``gc = sqrt(omega * Omega)``; the dimensionless controls are the frequency
ratio ``x = Omega/omega``, the total coupling ``q = (g1+g2)/gc`` and the
mixing fraction ``eta = g1/(g1+g2)`` (eta = 1 is the Jaynes-Cummings limit,
eta = 0 the anti-Jaynes-Cummings limit, eta = 1/2 the Rabi model).

All frequencies are energies divided by hbar; beta is an inverse energy
with k_B = 1.  The default dimensionless mode fixes hbar = gc = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

#: |q - 1| below this counts as sitting on the critical point.
CRITICAL_TOL = 1e-12


class Phase(Enum):
    NORMAL = "normal"
    CRITICAL = "critical"
    SUPERRADIANT = "superradiant"


class ModelKind(Enum):
    JC = "jc"
    AJC = "ajc"
    RABI = "rabi"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameter set. Immutable; validated on construction."""

    omega: float
    Omega: float
    g1: float
    g2: float
    beta: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0 and self.Omega > 0):
            raise ValueError("omega and Omega must be positive")
        if not (self.beta > 0 and self.hbar > 0):
            raise ValueError("beta and hbar must be positive")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("couplings g1, g2 must be non-negative")


@dataclass(frozen=True)
class DerivedParams:
    x: float
    gc: float
    q: float
    eta: float
    phase: Phase


def classify_phase(q: float) -> Phase:
    if abs(q - 1.0) <= CRITICAL_TOL:
        return Phase.CRITICAL
    return Phase.NORMAL if q < 1.0 else Phase.SUPERRADIANT


def derive(params: ModelParams) -> DerivedParams:
    """Dimensionless controls and phase of a parameter set."""
    x = params.Omega / params.omega
    gc = math.sqrt(params.omega * params.Omega)
    gtot = params.g1 + params.g2
    q = gtot / gc
    eta = params.g1 / gtot if gtot > 0 else 0.0
    return DerivedParams(x=x, gc=gc, q=q, eta=eta, phase=classify_phase(q))


def from_dimensionless(
    x: float,
    q: float,
    eta: float,
    gc: float = 1.0,
    beta: float = 1.0,
    hbar: float = 1.0,
) -> ModelParams:
    """Build physical parameters from (x, q, eta) at fixed gc.

    omega = gc/sqrt(x) and Omega = gc*sqrt(x), so omega*Omega = gc**2 is
    held fixed while x varies.
    """
    if x <= 0:
        raise ValueError("frequency ratio x must be positive")
    if q < 0:
        raise ValueError("coupling ratio q must be non-negative")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("mixing eta must lie in [0, 1]")
    rx = math.sqrt(x)
    return ModelParams(
        omega=gc / rx,
        Omega=gc * rx,
        g1=eta * q * gc,
        g2=(1.0 - eta) * q * gc,
        beta=beta,
        hbar=hbar,
    )


def kind_of(params: ModelParams) -> ModelKind:
    """Coupling structure of a parameter set (uncoupled counts as JC)."""
    if params.g2 == 0.0:
        return ModelKind.JC
    if params.g1 == 0.0:
        return ModelKind.AJC
    if params.g1 == params.g2:
        return ModelKind.RABI
    return ModelKind.GENERALIZED
