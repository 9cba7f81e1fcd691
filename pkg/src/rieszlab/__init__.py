"""Numerical laboratory for Riesz-type conjugate function inequalities for
harmonic and pluriharmonic maps of the unit ball."""

from __future__ import annotations

from .calculus import (dilatation_from_jacobian, empirical_K, frob_norm, heinz_ratio,
                       invariant_gradient, invariant_laplacian, local_dilatation, op_norm,
                       second_dilatation, wu_ratio)
from .errors import (ConvergenceError, DomainError, EvaluationError, InvalidArgumentError,
                     PrecisionLossError, SingularDerivativeError)
from .hardy import (conjugate_disk, g_tilde, green_G, green_g_hyperbolic, hardy_norm,
                    hardy_stein_residual, integral_mean, invariant_green_residual,
                    littlewood_paley_g, means_table, nontangential_max, stoll_G)
from .maps import (CustomMap, DiskAnalytic, FourierHarmonic, HolomorphicPolynomial, MapSpec,
                   PlanarHarmonic, PluriharmonicPair, SharpnessExample, ShearCounterexample,
                   coordinate, eval_map, evaluate, hyperbolic_poisson_extend, jet, poisson_extend)
from .quadrature import ball_rule, integrate_sphere, sphere_rule
from .verify import SuiteConfig, VerificationReport, run_suite

__version__ = "0.1.0"
