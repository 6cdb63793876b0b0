"""Numerical checks for ordered pairs u >= v solving
-div A(x, grad u) - |u|^{q-1}u >= -div A(x, grad v) - |v|^{q-1}v on R^n."""

__version__ = "0.1.0"

from .growth import GrowthFunctionalSpec, GrowthSeries, growth_T4, growth_T7, limsup_estimate
from .operators import (FluxField, MonotonicityReport, SamplePlan, check_alpha_monotonicity,
                        check_monotonicity, make_modified_p_laplacian, make_p_laplacian,
                        make_weighted_p_laplacian)
from .radial import (ExampleParams, RadialProfile, SolutionPair, build_example1, build_example23,
                     build_pair, derive_suitable_c, radial_p_laplacian)
from .regimes import RegimeDecision, RegimeQuery, classify, critical_exponent
from .weak_form import (CutoffFunction, QuadratureSpec, WeakResidualReport, make_cutoff,
                        mc_oracle_residual, weak_residual)
