"""Gerstner-type waves on the rotating f-plane riding on a uniform zonal current."""
from .errors import (ConvergenceError, DomainError, GerstnerError, InfeasibleError,
                     NoSurfaceError, OutOfFluidError, UnsupportedConfigError)
from .kinematics import (FlowState, LabelPoint, Phase, acceleration, curl, in_domain,
                         invert_flow_map, jacobian, jacobian_determinant, jacobian_inverse,
                         jacobian_rate, meridional_offset, phase, position, pressure,
                         pressure_label_gradient, velocity, velocity_gradient,
                         velocity_gradient_from_jacobian, vorticity)
from .model import (EARTH, CoriolisPair, FlowConfig, PhysicalConstants, ValidationReport,
                    coriolis_parameters, dispersion_gap, dispersion_residual, pollard_residual,
                    solve_dispersion, validate_config)
from .stratification import (DensityProfile, constant_profile, density, exponential_profile,
                             linear_profile, mass_conservation_residual, parse_profile,
                             stratified_euler_residual, stratified_pressure)
from .surface import (AdmissibilityReport, SurfaceProfile, check_admissibility, classify_current,
                      h, h_r, solve_surface, surface_mesh, surface_slope)
from .verification import (CheckResult, GridSpec, ResidualReport, euler_residual, mutate,
                           run_full_certification)

__version__ = "0.1.0"
