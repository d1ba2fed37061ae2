"""Lattice-point counts in thinning regions, Diophantine approximation counts and
saddle-connection counts on square-tiled surfaces, with convergence experiments."""

from ._backend import COMPILED as compiled_backend
from .diophantine import (
    FormSystem,
    ToralSystem,
    count_forms,
    count_toral,
    forms_lattice,
    forms_lattice_crosscheck,
)
from .errors import BudgetExceeded, ErgocountError, SingularBlockError, ValidationError
from .geometry import (
    AffineLattice,
    HDecomposition,
    SplitVector,
    UnimodularBasis,
    apply_dyadic_flow,
    apply_flow,
    ball_volume,
    decompose,
    recompose,
    shear_matrix,
    sphere_area,
)
from .harness import ConvergenceReport, Scenario, interpolate_monotone, run_scenario
from .lattice import (
    CountRequest,
    birkhoff_counts,
    block_counts,
    count_points,
    enumerate_points,
    reduce_basis,
)
from .origami import (
    Origami,
    SaddleConnectionSet,
    cone_points,
    count_saddle_connections,
    estimate_sv_constant,
    genus,
    trace_separatrix,
)
from .regions import IndicatorF, ThinningRegion, contains, mc_volume, region_volume
from .sampling import SeededStream, sample_form, sample_haar_x2, sample_toral
from .siegel import siegel_average, zeta
from .stats import MCEstimate

__version__ = "0.1.0"
