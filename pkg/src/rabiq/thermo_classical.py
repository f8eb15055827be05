"""Classical free energies from the coherent-state energy surfaces.

The bosonic operator is replaced by the complex amplitude a (so
a^dagger a -> |a|^2) and the two spin branches give the surfaces

    E_pm(a) = hbar omega |a|^2 +- hbar sqrt(G(a) + Omega^2/4),
    G(a) = (g1^2 + g2^2) |a|^2 + 2 g1 g2 Re(a^2),

with Z_C = sum_pm int d^2a/pi exp(-beta E_pm).  The Omega^2/4 spin term
(rather than Omega^2) makes E_pm(0) = +-hbar Omega/2, matching the quantum
spin doublet; the alternative is available through ``spin_term="printed"``
for comparison.

The integral is done in polar form: trapezoid in the angle (periodic, so
spectrally accurate) and composite Gauss-Legendre panels in t = r^2 with an
automatic cutoff where beta*(E - E_min) reaches ~46; the error estimate is
a Richardson comparison of n_r against 2 n_r nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureError
from .model import ModelParams, Phase
from .thermo_quantum import FreeEnergy, Method, Treatment

#: beta*(E - E_min) at the radial cutoff; e^-46 ~ 1e-20 of the peak weight.
CUTOFF_EXPONENT = 46.0

_PANEL_ORDER = 16


@dataclass(frozen=True)
class PhasePoint:
    re_a: float
    im_a: float

    def __post_init__(self):
        if not (math.isfinite(self.re_a) and math.isfinite(self.im_a)):
            raise ValueError("phase-space point must be finite")


@dataclass(frozen=True)
class QuadratureSpec:
    """Polar grid: radial cutoff (None = automatic), node counts, rule."""

    r_max: float | None = None
    n_r: int = 256
    n_theta: int = 64
    rule: str = "trapezoid-angular x adaptive-radial"

    def __post_init__(self):
        if self.n_r < 64 or self.n_theta < 64:
            raise ValueError("need n_r >= 64 and n_theta >= 64")
        if self.r_max is not None and self.r_max <= 0:
            raise ValueError("r_max must be positive")


def _spin_sq(params: ModelParams, spin_term: str) -> float:
    if spin_term == "half":
        return params.Omega**2 / 4.0
    if spin_term == "printed":
        return params.Omega**2
    raise ValueError("spin_term must be 'half' or 'printed'")


def classical_energies(p: PhasePoint, params: ModelParams,
                       spin_term: str = "half") -> tuple[float, float]:
    """Both branch energies (E_plus, E_minus) at a phase-space point."""
    t = p.re_a**2 + p.im_a**2
    coupling = (params.g1**2 + params.g2**2) * t \
        + 2.0 * params.g1 * params.g2 * (p.re_a**2 - p.im_a**2)
    root = math.sqrt(coupling + _spin_sq(params, spin_term))
    hb = params.hbar
    return hb * params.omega * t + hb * root, hb * params.omega * t - hb * root


def _radial_min(g_tot: float, omega: float, c2: float) -> tuple[float, float]:
    """Minimize omega*t - sqrt(G t + c^2) over t >= 0 (G = g_tot^2).

    Returns (t_star, value).  Interior minimum exists iff G^2 > 4 omega^2 c2.
    """
    g2 = g_tot * g_tot
    if g2 > 0:
        t_star = g2 / (4 * omega * omega) - c2 / g2
        if t_star > 0:
            return t_star, omega * t_star - math.sqrt(g2 * t_star + c2)
    return 0.0, -math.sqrt(c2)


def saddle_minimize(params: ModelParams) -> tuple[PhasePoint, float]:
    """Global minimizer of E_minus over the a-plane and its value.

    In the normal phase the minimum sits at a = 0 with E = -hbar Omega/2;
    past the transition it moves to a real amplitude (the axis maximizing
    the Re(a^2) coupling term for g1 g2 >= 0).
    """
    c2 = params.Omega**2 / 4.0
    t_star, val = _radial_min(params.g1 + params.g2, params.omega, c2)
    return PhasePoint(re_a=math.sqrt(t_star), im_a=0.0), params.hbar * val


def _grid_eval(params: ModelParams, beta: float, t_max: float, e_min: float,
               n_r: int, n_theta: int, spin_term: str) -> float:
    """ln of the shift-stabilized Z_C on an (n_r x n_theta) polar grid."""
    hb = params.hbar
    c2 = _spin_sq(params, spin_term)
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    g_theta = (params.g1**2 + params.g2**2) \
        + 2.0 * params.g1 * params.g2 * np.cos(2.0 * theta)
    nodes, weights = leggauss(_PANEL_ORDER)
    n_panels = max(1, math.ceil(n_r / _PANEL_ORDER))
    edges = np.linspace(0.0, t_max, n_panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    root = np.sqrt(g_theta[:, None] * t[None, :] + c2)
    osc = params.omega * t
    z = 0.0
    for sign in (-1.0, 1.0):
        e = hb * (osc[None, :] + sign * root)
        z += float((np.exp(-beta * (e - e_min)) @ w).sum())
    return math.log(z / n_theta)


def fc_quadrature(params: ModelParams, beta: float | None = None,
                  spec: QuadratureSpec | None = None, tol: float | None = None,
                  spin_term: str = "half") -> FreeEnergy:
    """Classical free energy by direct phase-space quadrature."""
    if beta is None:
        beta = params.beta
    if beta <= 0:
        raise ValueError("beta must be positive")
    spec = spec or QuadratureSpec()
    hb = params.hbar
    c2 = _spin_sq(params, spin_term)
    t_star, val = _radial_min(params.g1 + params.g2, params.omega, c2)
    e_min = hb * val
    if spec.r_max is not None:
        t_max = spec.r_max**2
    else:
        # march along the slowest-decaying angle until the weight is dead
        g_tot = params.g1 + params.g2
        t_max = max(t_star, 1.0 / (beta * hb * params.omega))
        def exponent(t):
            return beta * (hb * (params.omega * t - math.sqrt(g_tot**2 * t + c2)) - e_min)
        while exponent(t_max) < CUTOFF_EXPONENT:
            t_max *= 2.0
    coarse = _grid_eval(params, beta, t_max, e_min, spec.n_r, spec.n_theta, spin_term)
    fine = _grid_eval(params, beta, t_max, e_min, 2 * spec.n_r, spec.n_theta, spin_term)
    f_coarse = e_min - coarse / beta
    f_fine = e_min - fine / beta
    err = abs(f_fine - f_coarse)
    if tol is not None and err > tol:
        raise QuadratureError(
            f"radial refinement estimate {err:.3e} exceeds tolerance {tol:.3e}"
        )
    return FreeEnergy(f_fine, Treatment.CLASSICAL, Method.QUADRATURE, err)


def fc_numeric(params: ModelParams, beta: float | None = None,
               eps: float = 1e-10) -> FreeEnergy:
    """Quadrature refined (radially and angularly) until the Richardson
    estimate drops below eps."""
    if beta is None:
        beta = params.beta
    n_r, n_theta = 256, 64
    angular = params.g1 * params.g2 != 0.0
    last = None
    while n_r <= 2**15:
        result = fc_quadrature(params, beta, QuadratureSpec(n_r=n_r, n_theta=n_theta))
        err = result.err_estimate
        if angular and last is not None:
            err += abs(result.value - last.value)
        if err < eps and last is not None:
            return FreeEnergy(result.value, result.treatment, result.method, err)
        last = result
        n_r *= 2
        if angular:
            n_theta = min(2 * n_theta, 1024)
    raise QuadratureError("quadrature failed to reach the requested tolerance")


def fc_closed(phase: Phase, x: float, q: float, beta: float,
              gc: float = 1.0, hbar: float = 1.0) -> FreeEnergy:
    """Closed-form classical cells (identical for JC and aJC couplings)."""
    if phase is Phase.CRITICAL:
        raise ValueError("no closed-form cell exists at the critical point")
    if phase is Phase.NORMAL and not q < 1:
        raise ValueError("normal-phase cell requires q < 1")
    if phase is Phase.SUPERRADIANT and not q > 1:
        raise ValueError("superradiant cell requires q > 1")
    rx = math.sqrt(x)
    hg = hbar * gc
    if phase is Phase.NORMAL:
        value = -hg * rx / 2.0 - math.log(rx / (hg * beta * (1 - q * q))) / beta
    else:
        value = -(1 + q**4) * hg * rx / (4 * q * q) \
            - math.log(q * math.sqrt(math.pi / (beta * hbar * gc)) * x**0.75) / beta
    return FreeEnergy(value, Treatment.CLASSICAL, Method.CLOSED_FORM, 0.0)
