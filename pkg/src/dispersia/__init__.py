"""Fibonacci and Frolov point sets: dispersion, smooth discrepancy, discretization."""

__version__ = "0.1.0"

from ._errors import BudgetExceeded
from .geometry import (FrequencySet, FrolovLattice, PointSet, dual_lattice_in_shell,
                       enumerate_frequency_set, fibonacci_number, fibonacci_set,
                       frolov_matrix, frolov_set, hyperbolic_cross)
from .dispersion import AxisBox, DispersionResult, decay_report, dispersion_exact, dispersion_sampled
from .hatfun import (HatSpec, eval_hat, eval_hat_box, hat_fourier_line, hat_fourier_periodic,
                     sigma_bound, sigma_sum, verify_sigma_lemma)
from .cubature import (CubatureRule, estimate_gamma, fibonacci_cubature, frolov_cubature,
                       frolov_error_series, phi_weight)
from .discrepancy import (FixedVolumeQuery, classical_discrepancy_D1, discrepancy_decay_report,
                          dispersion_discrepancy_check, smooth_discrepancy_fixed_volume)
from .kernels import TrigPoly, dirichlet, fejer, trig_eval, trig_norm, vpoussin
from .discretization import (DiscretizationReport, exactness_check, marcinkiewicz_ratios,
                             universality_sweep)

__all__ = [
    "__version__",
    "BudgetExceeded",
    "FrequencySet",
    "FrolovLattice",
    "PointSet",
    "dual_lattice_in_shell",
    "enumerate_frequency_set",
    "fibonacci_number",
    "fibonacci_set",
    "frolov_matrix",
    "frolov_set",
    "hyperbolic_cross",
    "AxisBox",
    "DispersionResult",
    "decay_report",
    "dispersion_exact",
    "dispersion_sampled",
    "HatSpec",
    "eval_hat",
    "eval_hat_box",
    "hat_fourier_line",
    "hat_fourier_periodic",
    "sigma_bound",
    "sigma_sum",
    "verify_sigma_lemma",
    "CubatureRule",
    "estimate_gamma",
    "fibonacci_cubature",
    "frolov_cubature",
    "frolov_error_series",
    "phi_weight",
    "FixedVolumeQuery",
    "classical_discrepancy_D1",
    "discrepancy_decay_report",
    "dispersion_discrepancy_check",
    "smooth_discrepancy_fixed_volume",
    "TrigPoly",
    "dirichlet",
    "fejer",
    "trig_eval",
    "trig_norm",
    "vpoussin",
    "DiscretizationReport",
    "exactness_check",
    "marcinkiewicz_ratios",
    "universality_sweep",
]
