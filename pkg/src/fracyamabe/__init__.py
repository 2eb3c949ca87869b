"""Spectral solver for G-invariant fractional Yamabe problems and systems on S^N.

G = O(m) x O(n) acts on S^N, N = m + n - 1, and G-invariant functions reduce
to profiles on [-1, 1] expanded in Jacobi polynomials.
"""
from .bilinear import AccuracyError, QuadSpec, dirichlet_form_direct
from .geometry import (PoleError, ProblemParams, conformal_factor, orbit_angle, orbit_point,
                       orbit_t, stereo, stereo_inv)
from .solver import (CollapseError, CouplingSpec, Partition, ProjectionError, ResolutionError,
                     SegregationError, SolverError, SolverOptions, SupportError, SystemState,
                     continuation_segregate, energy_J, energy_system, extract_partition,
                     grad_system, minimize_system, nehari_project, partition_sweep,
                     sign_change_obstruction, solve_dirichlet_interval)
from .special import (JacobiBasis, JacobiParams, QuadratureError, gauss_jacobi, jacobi_deriv,
                      jacobi_eval, jacobi_norm_h, log_gamma, weight_normalizer)
from .spectral import (SpectralField, SpectrumTable, analyze, apply_Ps, holder_series, inner_Hs,
                       lp_integral, norm_Hs, spectrum, symbol_asymptotics, symbol_phi, synthesize)

__version__ = "0.1.0"
