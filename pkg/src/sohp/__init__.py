"""Kinetic and hydrodynamic models of self-propelled particles with
alignment and precession."""

__version__ = "0.1.0"

from .params import ModelParams
from .sphere import (ThetaGrid, VmfParams, langevin_c1, langevin_closed_form,
                     project_tangent, spherical_from_unit, unit_from_spherical, vmf_density)
from .gci import (GciSolution, HydroCoefficients, assemble_gci_system, compute_ab,
                  compute_coefficients, self_convergence, solve_gci)
from .hyperbolicity import (CubicCoefficients, HyperbolicityReport, RootClassification,
                            char_poly, scan_hyperbolicity, solve_cubic)
from .hydro1d import (FlowParams, HydroError, StateField1D, flux_matrix, initial_state,
                      physical_time, run_hydro, step_hydro)
from .llg import (LlgCoefficients, OrientationField, dirichlet_energy, ell_term, llg_step,
                  max_stable_dt_diffusive, max_stable_dt_llg, random_smooth_field, spin_wave,
                  step_diffusive)
from .kinetic import (EquilibriumDiagnostics, ParticleEnsemble, RelaxationConfig,
                      cos_samples, equilibrium_diagnostics, run_relaxation, sde_step,
                      two_sample_ks)
