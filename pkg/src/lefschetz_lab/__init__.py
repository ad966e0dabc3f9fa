"""Exact verification of Sasakian operator identities and the contact Hard Lefschetz property on invariant forms of Lie algebras."""
__version__ = "0.1.0"

from .complex import InvariantComplex, LieAlgebraSpec, build_complex, class_of, cohomology, salamon
from .errors import (
    ContactError,
    ContractError,
    DimensionError,
    FixtureError,
    InvariantViolation,
    JacobiError,
    LefschetzLabError,
    MetricError,
    PreconditionError,
    SasakianError,
    StructuralError,
)
from .exterior import Form, GradedOperator, insert_endo, interior, wedge
from .hodge import HodgePackage, MetricStructure, inner, integrate_top, star
from .sasakian import ContactStructure, SasakianStructure, contact_structure, reeb, sasakian_check

__all__ = [
    "ContactError", "ContactStructure", "ContractError", "DimensionError", "FixtureError", "Form",
    "GradedOperator", "HodgePackage", "InvariantComplex", "InvariantViolation", "JacobiError",
    "LefschetzLabError", "LieAlgebraSpec", "MetricError", "MetricStructure", "PreconditionError",
    "SasakianError", "SasakianStructure", "StructuralError", "build_complex", "class_of", "cohomology",
    "contact_structure", "inner", "insert_endo", "integrate_top", "interior", "reeb", "salamon",
    "sasakian_check", "star", "wedge",
]
