"""Classification of simple isolated complete intersection singularities
in arbitrary characteristic."""

from .coeff import make_field
from .parse import parse_germ, parse_poly
from .poly import MapGerm, Poly
from .singtype import SingularityType

__version__ = "0.1.0"

__all__ = ["make_field", "parse_germ", "parse_poly", "MapGerm", "Poly", "SingularityType",
           "__version__"]
