"""lassokit: lasso paths, KKT diagnostics and solution-set analysis for
arbitrary (possibly rank-deficient) designs."""
from .errors import (CapabilityError, ConvergenceError, CyclingError, DivergenceError,
                     InconsistencyError, InputError, LassoKitError, RangeError,
                     UnsupportedError)
from .kkt import (EquiState, KktReport, ProblemInstance, check_kkt, equicorrelation,
                  general_position_check, lasso_objective)

__version__ = "0.1.0"
