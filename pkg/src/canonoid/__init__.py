"""Exact symbolic toolkit for canonoid transformations on polynomial phase space."""

from .classifiers import (
    CanonoidVerdict,
    Decomposition,
    FieldClassification,
    MasterVerdict,
    bracket_hamiltonian,
    canonoid_finite,
    canonoid_infinitesimal,
    classify_field,
    com_degree,
    conserved_observable,
    decompose_symmetry,
    master_degree,
    observable_value,
)
from .errors import CanonoidError
from .forms import (
    DiffForm,
    PolyMap,
    VectorField,
    divergence,
    ext_d,
    interior_prod,
    lie_bracket,
    lie_deriv,
    lie_deriv_form,
    pullback_form,
    pushforward_field,
    wedge,
)
from .gauge import GaugeResult, gauge_fix_strong, gauge_fix_weak
from .poly import PhaseSpace, ScalarPoly, equal_mod_constant, monomials_up_to
from .symplectic import (
    CONVENTION,
    SymplecticForm,
    canonical_omega,
    flat,
    hamiltonian_field,
    homotopy_operator,
    homotopy_potential,
    liouville_field,
    poisson,
    sharp,
    validate_symplectic,
)
from .twisted import TwistedContext, d_gamma, del_gamma, iter_lie

__version__ = "0.1.0"
