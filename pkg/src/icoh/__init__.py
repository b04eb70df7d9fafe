"""icoh: exact Bott-Chern / Aeppli cohomology and ABC-Massey products for
invariant complex structures on Lie-algebra models."""

from .scalars import GaussScalar, Rational, gauss, render_scalar
from .linalg import (AffineSet, ExactMatrix, Subspace, kernel_basis,
                     quotient_dim, rref, solve)
from .forms import (FormContext, FormExpr, MIXED, bidegree, conjugate,
                    coordinates, wedge)
from .model import (BoundModel, CharacterGen, LatticeRule, ModelSpec,
                    ParamBinding, bind, bind_params, integrability_check,
                    lattice_trivial, parse_form, parse_model, parse_scalar,
                    render_model, validate)
from .calculus import (DefectReport, Metric, aeppli_harmonic, bc_harmonic,
                       ddbar, del_op, delbar_op, differential,
                       geom_bc_formality, hodge_star, skt_check,
                       skt_family_condition)
from .cohomology import (BGAMMA_C, ComplexCtx, CohomologySpace, FULL_INVARIANT,
                         KS_B, aeppli, bott_chern, de_rham, dolbeault,
                         enumerate_space, ks_hodge_numbers, schweitzer_h,
                         special_type_bc_decomposition)
from .massey import (BCClass, NONVANISHING, UNDEFINED, VANISHING, bc_class,
                     ddbar_primitive, quad_product, search_obstruction,
                     triple_product)
from .catalog import get_bound, get_model, ks_model_text, list_models

__version__ = "0.1.0"
