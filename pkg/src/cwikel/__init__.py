"""Numerical workbench for critical Cwikel-type spectral estimates."""

from .errors import (AliasError, BoxTooSmall, ConfigError, CwikelError,
                     DegenerateCube, GridMismatch, IoError, NegativeFunction,
                     NegativeWeight, NonIntegrable, OriginSingularity,
                     UnsupportedDimension, ZeroFunction, ZeroSeminorm)
from .stepfn import StepFunction, dilation, disjoint_sum, from_atoms, indicator
from .fields import (Box, SampledFunction, Torus, band_coefficients,
                     box_function, decreasing_rearrangement, torus_function)
from .geometry import TorusCube
from .orlicz import (EXPL2, LLOGL, OrliczGauge, continuity_modulus, exp_l2_norm,
                     j_functional, lambda1_norm, luxemburg_gauge,
                     marcinkiewicz_psi_norm, orlicz_norm)
from .covering import (Covering, CoverageReport, besicovitch_select,
                       build_equal_j_covering, cube_radius_for_budget,
                       verify_covering)
from .approx import (CellProjector, FiniteRankOperator, apply_Kn, build_Kn,
                     comparison_constant_probe, evaluate_fourier, hom_seminorm,
                     poly_projector, random_band_limited, random_fourier_coeffs,
                     scaled_holder_check, sobolev_norm, weighted_error)
from .spectral import (CwikelMatrix, FourierLattice, SingularSpectrum,
                       assemble_cwikel, assemble_torus_cwikel,
                       birman_schwinger_count, cwikel_ratio,
                       diagonal_majorization_check, half_operator_quasinorm,
                       singular_values, weak_quasinorm)
from .inversion import (GrowthRecord, appendix_a_checks, counterexample_family,
                        counterexample_growth, inversion_U, inversion_V,
                        rd_rhs_norm, small_ball_lower_bound, split_norm,
                        unit_ball_mask)
from .experiments import Check, ExperimentConfig, Report, emit_plots, run

__version__ = "0.1.0"
