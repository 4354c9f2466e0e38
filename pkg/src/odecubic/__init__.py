"""Point classification of second-order ODEs cubic in the first derivative.

The package decides, for an equation of the form
``y'' = P(x,y) + 3Q(x,y)y' + 3R(x,y)y'^2 + S(x,y)y'^3``, which of eight
point-equivalence classes it belongs to, reporting the matched model
equation, the values of the deciding differential invariants, extracted
class parameters and the symmetry-algebra generators.
"""

from .backend import BACKEND, DomainError, backend_name, evaluate
from .classifier import (Classification, classify, classify_equation,
                         extract_theorem3, extract_theorem4, extract_theorem7,
                         model_equation)
from .expr import Expr, differentiate, substitute, to_string
from .invariants import InvariantEngine, RelativeInvariants, relative_invariants
from .ode import (AffineMap, NormalizeError, OdeCubic, normalize_to_cubic,
                  ode_equal, pullback_affine)
from .parser import ParseError, parse_equation, parse_expression
from .probing import (Probe, ProbeExhausted, constant_value,
                      is_identically_zero, snap_rational)

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "BACKEND", "Classification", "DomainError", "Expr",
    "InvariantEngine", "NormalizeError", "OdeCubic", "ParseError", "Probe",
    "ProbeExhausted", "RelativeInvariants", "backend_name", "classify",
    "classify_equation", "constant_value", "differentiate", "evaluate",
    "extract_theorem3", "extract_theorem4", "extract_theorem7",
    "is_identically_zero", "model_equation", "normalize_to_cubic",
    "ode_equal", "parse_equation", "parse_expression", "pullback_affine",
    "relative_invariants", "snap_rational", "substitute", "to_string",
]
