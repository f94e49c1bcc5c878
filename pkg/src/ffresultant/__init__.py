"""Exact computations for k-resultant modulus sets over finite fields."""
from .field import FieldElement, FieldSpec, arith, build_field, field_of_order
from .fourier import GridFunction, Spectrum, forward_transform, inverse_transform, plancherel_residual
from .grid import PointSet, read_pointset, write_pointset
from .polynomial import PolynomialExpr, format_polynomial, linear_factor_test, parse_polynomial
from .resultant import (BoundLedger, DeltaSet, EnergyValue, NuProfile, bound_ledger, delta_k,
                        dot_product_resultant, energy, nu_profile, spectral_moment)
from .varieties import (RegularityReport, construct_isotropic_example, construct_sharp_example,
                        construct_subfield_example, paraboloid, regularity_report, sphere,
                        sphere_cardinality_formula, zero_set)

__version__ = "0.1.0"
