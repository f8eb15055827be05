"""Quantum partition functions and free energies.

Convention: every quantum free energy in this package refers to the
Hamiltonian with the oscillator zero-point included, i.e. the spectrum of
:func:`rabiq.spectra.build_hamiltonian` shifted up by hbar*omega/2.  That
is the symmetric-ordering counterpart of the classical energy surface
``hbar omega |a|^2 + ...`` used in ``thermo_classical``, so quantum and
classical treatments describe the same system and their difference is
meaningful.  Concretely:

* the closed JC/aJC doublet formulas (``spectra.jc_levels`` /
  ``ajc_levels``) already carry this shift relative to the matrix;
* the exact-spectrum route used here adds the unpaired spin level the
  doublet formulas miss, making the analytic sums equal to diagonalization
  to machine precision;
* g = 0 then reproduces F = ln(2 sinh(beta hbar omega / 2))/beta
  - ln(2 cosh(beta hbar Omega / 2))/beta exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError
from .model import ModelKind, ModelParams, Phase, kind_of
from .spectra import HARD_CAP, Spectrum, rabi_spectrum

#: Default relative tail tolerance of truncated Boltzmann sums.  Delta_QC is
#: a small difference of large free energies, so keep ~10 significant digits.
DEFAULT_EPS = 1e-10


class Treatment(Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


class Method(Enum):
    CLOSED_FORM = "closed-form"
    SPECTRUM_SUM = "spectrum-sum"
    QUADRATURE = "quadrature"
    SADDLE_POINT = "saddle-point"


@dataclass(frozen=True)
class FreeEnergy:
    value: float
    treatment: Treatment
    method: Method
    err_estimate: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("free energy must be finite")
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be non-negative")


def partition_sum(spec: Spectrum, beta: float) -> FreeEnergy:
    """F = E_min - ln(sum e^{-beta(E-E_min)})/beta over a spectrum.

    Shift-stabilized, so it never overflows however deep the levels sit.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    levels = np.asarray(spec.levels, dtype=float)
    if levels.size == 0:
        raise ValueError("spectrum is empty")
    e_min = float(levels[0])
    z = float(np.exp(-beta * (levels - e_min)).sum())
    err = (spec.tail_bound or 0.0) / beta
    return FreeEnergy(
        value=e_min - math.log(z) / beta,
        treatment=Treatment.QUANTUM,
        method=Method.SPECTRUM_SUM,
        err_estimate=err,
    )


def euler_maclaurin_sum(f, n0: float, order: int = 2,
                        fprime=None, fthird=None) -> float:
    """Approximate sum_{n >= n0} f(n) for smooth decaying f.

    Integral plus endpoint corrections: int_{n0}^inf f + f(n0)/2
    - f'(n0)/12, with +f'''(n0)/720 at order 2.  Derivatives default to
    central finite differences (f must be evaluable slightly below n0).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    f0 = f(n0)
    # confirm the integrand actually dies off before trusting quadrature
    span = 1.0
    for _ in range(60):
        if abs(f(n0 + span)) <= 1e-12 * (1.0 + abs(f0)):
            break
        span *= 2.0
    else:
        raise ConvergenceError("summand does not decay at the sampled upper range")
    integral, _ = quad(f, n0, n0 + span, epsabs=1e-300, epsrel=1e-12, limit=500)
    tail, _ = quad(f, n0 + span, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)
    if fprime is not None:
        d1 = fprime(n0)
    else:
        h = 6e-6 * max(1.0, abs(n0))
        d1 = (f(n0 + h) - f(n0 - h)) / (2.0 * h)
    total = integral + tail + f0 / 2.0 - d1 / 12.0
    if order == 2:
        if fthird is not None:
            d3 = fthird(n0)
        else:
            h = 2e-3 * max(1.0, abs(n0))
            d3 = (f(n0 + 2 * h) - 2 * f(n0 + h) + 2 * f(n0 - h) - f(n0 - 2 * h)) / (2.0 * h**3)
        total += d3 / 720.0
    return total


def exact_thermal_levels(params: ModelParams, n_cut: int) -> np.ndarray:
    """Exact zero-point-shifted spectrum of a JC or aJC parameter set.

    Lower/upper doublet branches s*omega -+ sqrt(g^2 s + c^2) with
    c = (Omega -+ omega)/2; the s = 0 member of one branch is the unpaired
    spin level.  Identical (in exact arithmetic) to diagonalizing the
    matrix and adding hbar*omega/2.
    """
    kind = kind_of(params)
    hb, w = params.hbar, params.omega
    if kind is ModelKind.JC:
        g, c = params.g1, (params.Omega - w) / 2.0
        s_lower, s_upper = 0, 1
    elif kind is ModelKind.AJC:
        g, c = params.g2, (params.Omega + w) / 2.0
        s_lower, s_upper = 1, 0
    else:
        raise ValueError("exact thermal levels exist only for g1*g2 = 0")
    s_lo = np.arange(s_lower, n_cut + 1, dtype=float)
    s_up = np.arange(s_upper, n_cut + 1, dtype=float)
    lower = hb * (s_lo * w - np.sqrt(g * g * s_lo + c * c))
    upper = hb * (s_up * w + np.sqrt(g * g * s_up + c * c))
    return np.sort(np.concatenate([lower, upper]))


def _analytic_fq(params: ModelParams, beta: float, eps: float) -> FreeEnergy:
    w = params.omega
    g = params.g1 + params.g2
    # displaced-well location (superradiant side) sets the starting cut
    s_star = 0.0
    if g > 0:
        s_star = max(0.0, g * g / (4 * w * w) - params.Omega**2 / (4 * g * g))
    n_cut = max(256, math.ceil(20.0 / (beta * params.hbar * w)), math.ceil(2.5 * s_star))
    prev = None
    while True:
        if n_cut > 2**26:
            raise ConvergenceError("analytic level sum failed to converge", index=n_cut)
        levels = exact_thermal_levels(params, n_cut)
        e_min = float(levels[0])
        weights = np.exp(-beta * (levels - e_min))
        z = float(weights.sum())
        f = e_min - math.log(z) / beta
        cut = max(1, levels.size // 10)
        tail = float(weights[-cut:].sum()) / z
        if prev is not None and tail < eps and abs(f - prev) < eps / beta:
            return FreeEnergy(f, Treatment.QUANTUM, Method.SPECTRUM_SUM, tail / beta)
        prev = f
        n_cut *= 2


def fq_numeric(params: ModelParams, beta: float | None = None,
               eps: float = DEFAULT_EPS, cross_check: bool = False) -> FreeEnergy:
    """Quantum free energy by spectrum summation.

    JC/aJC parameter sets use the exact closed-form spectrum (fast at any
    x); anything with g1*g2 > 0 is diagonalized adaptively.  Both routes
    include the zero-point shift, so they agree to truncation accuracy;
    ``cross_check`` recomputes a JC/aJC result by diagonalization and
    verifies the agreement (costly at large x).
    """
    if beta is None:
        beta = params.beta
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    kind = kind_of(params)
    if kind in (ModelKind.JC, ModelKind.AJC):
        result = _analytic_fq(params, beta, eps)
        if cross_check:
            other = _diag_fq(params, beta, eps)
            tol = 100.0 * eps / beta + 1e-10 * max(1.0, abs(result.value))
            if abs(other.value - result.value) > tol:
                raise ConvergenceError(
                    "analytic and diagonalization routes disagree: "
                    f"{result.value!r} vs {other.value!r}"
                )
        return result
    return _diag_fq(params, beta, eps)


def _diag_fq(params: ModelParams, beta: float, eps: float) -> FreeEnergy:
    spec = rabi_spectrum(params, beta, eps, hard_cap=HARD_CAP)
    base = partition_sum(spec, beta)
    return FreeEnergy(
        value=base.value + params.hbar * params.omega / 2.0,
        treatment=Treatment.QUANTUM,
        method=Method.SPECTRUM_SUM,
        err_estimate=base.err_estimate,
    )


def fq_closed(kind: ModelKind, phase: Phase, x: float, q: float, beta: float,
              gc: float = 1.0, hbar: float = 1.0) -> FreeEnergy:
    """Closed-form quantum free-energy cells (normal and superradiant).

    Transcribed verbatim.  The normal-phase 1/x terms sit
    q^4/(beta(1-q^2)) * (hbar gc)^2 above the exact level-sum asymptotics
    (an endpoint-anharmonicity cross term the closed derivation drops), so
    agreement with the numeric routes saturates at that order.
    """
    if phase is Phase.CRITICAL:
        raise ValueError("no closed-form cell exists at the critical point")
    if phase is Phase.NORMAL and not q < 1:
        raise ValueError("normal-phase cell requires q < 1")
    if phase is Phase.SUPERRADIANT and not q > 1:
        raise ValueError("superradiant cell requires q > 1")
    if kind not in (ModelKind.JC, ModelKind.AJC):
        raise ValueError("closed forms exist for the JC and aJC models only")
    rx = math.sqrt(x)
    hg = hbar * gc
    if phase is Phase.NORMAL:
        base = -hg * rx / 2.0 - math.log(rx / (hg * beta * (1 - q * q))) / beta
        if kind is ModelKind.JC:
            value = base + hg * q * q / (2 * rx) + (
                (hbar * beta * gc) ** 2 * (q * q - 1) ** 3 + 24 * q * q
            ) / (24 * beta * (q * q - 1) * x)
        else:
            value = base - hg * q * q / (2 * rx) + (
                -((hbar * beta * gc) ** 2) * (q * q - 1) ** 3
                + 24 * q * q * (2 * q * q + 1)
            ) / (24 * x * beta * (1 - q * q))
    else:
        sign = -2.0 if kind is ModelKind.JC else 2.0
        value = -hg * (x * (q**4 * x + x + sign) + 1) / (4 * q * q * x**1.5) \
            - math.log(q * math.sqrt(math.pi / (hbar * beta * gc)) * x**0.75) / beta
    return FreeEnergy(value, Treatment.QUANTUM, Method.CLOSED_FORM, 0.0)
