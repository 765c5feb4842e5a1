"""drds: discrete rational dynamical systems toolkit.

Simulate, analyze and certify rational difference equations and rational
self-maps of the positive orthant: equilibria and local stability, global
asymptotic stability certificates (rigorous and semi-rigorous), periodic
convergence certificates, exact periodicity detection, and automated
discovery of algebraic invariants implying boundedness.
"""

__version__ = "0.1.0"

from .errors import (DegenerateEquation, DivisionByZero, DrdsError, ExpressionTooLarge,
                     IndefiniteDenominator, InterpolationMismatch, JacobianSingularEvaluation,
                     LagTooDeep, NoStableFixedPoint, NotConverged, NotPerfectSquare,
                     NotPositive, Overflow, ParseError, UnknownSymbol, UnsupportedKind,
                     ZeroDenominator)
from .interval import Interval
from .poly import (Polynomial, RationalFunction, compose, differentiate, evaluate,
                   rf_equal, rf_normalize)
from .parsing import (format_equation, format_map, format_polynomial, format_rational,
                      parse_equation, parse_expression, parse_map)
from .systems import (DifferenceEquation, Orbit, RandomSpec, Transformation,
                      companion_map, detect_period_numeric, detect_period_symbolic,
                      orbit, random_equation, random_map)
from .equilibria import (DiagonalRoot, FixedPoint, StabilityReport, diagonal_equilibria,
                         diagonal_fixed_points, fixed_points_numeric, local_stability,
                         positive_fixed_points)
from .stability import (Certificate, ContractionObjective, build_objective,
                        conjecture_global, prove_global_stability,
                        prove_positive_rigorous, prove_positive_semirigorous)
from .positivity import (prove_positive_on_orthant, replay_interior_zero_proof,
                         replay_plane_factorization)
from .periodic import (PeriodicManifold, ResidualNorm, SmoothedObjective,
                       build_smoothed_objective, extract_limit_cycle, manifold,
                       multistart_certify, prove_conjecture1_rigorous, residual_norm)
from .invariants import (BoundednessCertificate, Invariant, InvariantAnsatz,
                         boundedness_certificate, find_invariant, invariant_drift,
                         verify_invariant)
