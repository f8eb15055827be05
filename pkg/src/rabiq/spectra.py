"""Energy spectra: closed-form Jaynes-Cummings ladders and exact
diagonalization of the generalized Rabi Hamiltonian in a truncated Fock
space.

Closed-form routes follow the literature level formulas verbatim; note
those formulas sit a uniform hbar*omega/2 above the eigenvalues of the
normal-ordered Hamiltonian built by :func:`build_hamiltonian` (the
thermodynamics layer reconciles the two conventions, see
``thermo_quantum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .eigh import sym_eigh_verified
from .errors import ConvergenceError
from .model import ModelParams

#: Largest Fock truncation attempted before reporting failure.
HARD_CAP = 16384


class SpectrumSource(Enum):
    ANALYTIC_JC = "analytic-jc"
    ANALYTIC_AJC = "analytic-ajc"
    DIAGONALIZATION = "diagonalization"


@dataclass(frozen=True)
class Spectrum:
    """Ascending energy levels plus truncation metadata.

    ``n_max`` is the Fock truncation (None for closed-form ladders);
    ``tail_bound`` estimates the relative weight in Z of what was cut at
    the inverse temperature the spectrum was converged for (None when no
    convergence test was run).
    """

    levels: np.ndarray
    source: SpectrumSource
    n_max: int | None = None
    converged: bool = False
    tail_bound: float | None = None


@dataclass(frozen=True)
class SymmetricMatrix:
    dimension: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.dimension, self.dimension):
            raise ValueError("entries shape does not match dimension")
        if not np.array_equal(self.entries, self.entries.T):
            raise ValueError("entries must be exactly symmetric")


def jc_levels(params: ModelParams, n_max: int) -> Spectrum:
    """Closed-form rotating-wave (g2 = 0) doublets E_n^+- for n = 0..n_max.

    E_n^+- = hbar (n+1) omega +- hbar sqrt(g1^2 (n+1) + (omega-Omega)^2/4).
    """
    if params.g2 != 0.0:
        raise ValueError("jc_levels requires g2 = 0")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    hb = params.hbar
    n = np.arange(n_max + 1, dtype=float)
    root = np.sqrt(params.g1**2 * (n + 1) + (params.omega - params.Omega) ** 2 / 4.0)
    levels = np.concatenate([
        hb * (n + 1) * params.omega - hb * root,
        hb * (n + 1) * params.omega + hb * root,
    ])
    return Spectrum(levels=np.sort(levels), source=SpectrumSource.ANALYTIC_JC, n_max=n_max)


def ajc_levels(params: ModelParams, n_max: int) -> Spectrum:
    """Closed-form anti-rotating (g1 = 0) doublets for n = -1..n_max.

    E_n^+- = (n+1/2) hbar omega
             +- (hbar omega - sqrt(4 hbar^2 g2^2 (n+1) + hbar^2 (omega+Omega)^2))/2.
    """
    if params.g1 != 0.0:
        raise ValueError("ajc_levels requires g1 = 0")
    if n_max < -1:
        raise ValueError("n_max must be >= -1")
    hb = params.hbar
    n = np.arange(-1, n_max + 1, dtype=float)
    root = np.sqrt(4.0 * params.g2**2 * (n + 1) + (params.omega + params.Omega) ** 2)
    half = (params.omega - root) / 2.0
    levels = np.concatenate([
        hb * ((n + 0.5) * params.omega + half),
        hb * ((n + 0.5) * params.omega - half),
    ])
    return Spectrum(levels=np.sort(levels), source=SpectrumSource.ANALYTIC_AJC, n_max=n_max)


def build_hamiltonian(params: ModelParams, n_max: int) -> SymmetricMatrix:
    """Generalized Rabi Hamiltonian on |n,s>, n = 0..n_max, s in {down,up}.

    Basis index 2n+s interleaves the spin, keeping the matrix banded.
    Diagonal: hbar omega n + s hbar Omega / 2.  Couplings:
    <n,up|H|n+1,down> = hbar g1 sqrt(n+1) (rotating) and
    <n+1,up|H|n,down> = hbar g2 sqrt(n+1) (anti-rotating).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    hb = params.hbar
    dim = 2 * (n_max + 1)
    h = np.zeros((dim, dim))
    n = np.arange(n_max + 1)
    h[2 * n, 2 * n] = hb * params.omega * n - hb * params.Omega / 2.0
    h[2 * n + 1, 2 * n + 1] = hb * params.omega * n + hb * params.Omega / 2.0
    root = hb * np.sqrt(n[:-1] + 1.0)
    up = 2 * n[:-1] + 1          # |n, up>
    down_next = 2 * (n[:-1] + 1)  # |n+1, down>
    h[up, down_next] = params.g1 * root
    h[down_next, up] = params.g1 * root
    h[down_next + 1, up - 1] = params.g2 * root  # <n+1,up|H|n,down>
    h[up - 1, down_next + 1] = params.g2 * root
    return SymmetricMatrix(dimension=dim, entries=h)


def sym_eigenvalues(m: SymmetricMatrix, tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, residual-checked.

    Implicit eigenvectors are formed internally (inverse iteration on the
    tridiagonal reduction) and every pair must satisfy
    ||M v - lambda v|| <= tol * ||M||_2; the vectors are then discarded.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return sym_eigh_verified(m.entries, tol)


def _tail_fraction(levels: np.ndarray, beta: float) -> float:
    """Relative Boltzmann weight of the top energy decile of a spectrum."""
    shifted = levels - levels[0]
    weights = np.exp(-beta * shifted)
    z = float(weights.sum())
    cut = max(1, levels.size // 10)
    return float(weights[-cut:].sum()) / z


def rabi_spectrum(params: ModelParams, beta: float, eps: float = 1e-10,
                  hard_cap: int = HARD_CAP) -> Spectrum:
    """Numerically exact spectrum with adaptive Fock truncation.

    Starts at n_max = max(64, ceil(20/(beta hbar omega))) and doubles until
    (i) the Boltzmann weight of the kept top energy decile is below eps and
    (ii) the implied free energy moves by less than eps/beta between
    doublings.  Raises ConvergenceError beyond ``hard_cap`` Fock states.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if beta <= 0:
        raise ValueError("beta must be positive")
    n_max = max(64, math.ceil(20.0 / (beta * params.hbar * params.omega)))
    prev_f = None
    while True:
        if 2 * (n_max + 1) > 2 * hard_cap:
            raise ConvergenceError(
                f"Fock truncation exceeded hard cap ({hard_cap} states)",
                index=n_max,
            )
        levels = sym_eigenvalues(build_hamiltonian(params, n_max), tol=1e-10)
        shifted = levels - levels[0]
        z = float(np.exp(-beta * shifted).sum())
        f = levels[0] - math.log(z) / beta
        tail = _tail_fraction(levels, beta)
        if prev_f is not None and tail < eps and abs(f - prev_f) < eps / beta:
            return Spectrum(
                levels=levels,
                source=SpectrumSource.DIAGONALIZATION,
                n_max=n_max,
                converged=True,
                tail_bound=tail,
            )
        prev_f = f
        n_max *= 2
