"""Two-body scattering in the Galilean Lee model and its delta-function limit."""
from .errors import LeeModelError, NumericalError, ParameterError
from .model import (BareCouplings, Gaussian, KinematicState, Local, MassSpectrum, ModelParams,
                    SharpCutoff, form_factor, make_params, total_energy)
from .propagator import (BelowThreshold, GeneralComplex, ScatteringLimit, inverse_propagator_bare,
                         inverse_propagator_renormalized, pair_coefficients, renormalized_bracket,
                         self_energy)
from .renorm import (DELTA_LIMIT, PhysicalParams, bare_coupling_sq, bare_internal_energy,
                     contact_lambda, physical_from_bare, renormalized_coupling_sq, solve_bound_state)
from .scattering import (CrossSectionPoint, differential_cross_section, phase_shift,
                         s_matrix_element, sweep, t_amplitude, total_cross_section)

__version__ = "0.1.0"
