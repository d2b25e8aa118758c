"""Executable CP*-construction over finite-dimensional Hilbert spaces and finite relations."""
from .backends import FHILB, REL, Backend, Morphism, Obj
from .errors import CPStarError
from .numeric import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"

__all__ = ["FHILB", "REL", "Backend", "Morphism", "Obj", "CPStarError", "DEFAULT_TOL",
           "Tolerance", "__version__"]
