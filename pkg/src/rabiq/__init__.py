"""rabiq: quantum-classical free-energy gap of the generalized Rabi model."""

from .analysis import (
    DeltaResult,
    ScalingFit,
    ScanRow,
    ScanTable,
    a_of_eta,
    coeff_closed,
    critical_scan,
    delta_qc,
    experiment_estimate,
    fit_ab,
    fit_at,
    fit_basis,
    log_grid,
    oracle_free_particle,
    oracle_harmonic,
    scan,
)
from .errors import ConvergenceError, QuadratureError
from .model import (
    DerivedParams,
    ModelKind,
    ModelParams,
    Phase,
    derive,
    from_dimensionless,
    kind_of,
)
from .spectra import (
    Spectrum,
    SpectrumSource,
    SymmetricMatrix,
    ajc_levels,
    build_hamiltonian,
    jc_levels,
    rabi_spectrum,
    sym_eigenvalues,
)
from .thermo_classical import (
    PhasePoint,
    QuadratureSpec,
    classical_energies,
    fc_closed,
    fc_numeric,
    fc_quadrature,
    saddle_minimize,
)
from .thermo_quantum import (
    FreeEnergy,
    Method,
    Treatment,
    euler_maclaurin_sum,
    exact_thermal_levels,
    fq_closed,
    fq_numeric,
    partition_sum,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
