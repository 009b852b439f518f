"""schrodlab: desk-scale numerics for higher-order Schrodinger symbols.

Submodules
----------
symbols    exact homogeneous polynomial symbols and ellipticity certification
geometry   level-surface geometry: finite type, convexity, curvature, Gauss map
exponents  admissible exponent calculus and interval comparisons
kernel     oscillatory-integral evaluation of the free kernel and decay fits
spectral   grid-based functional calculus: propagator, resolvent, integrated group
potential  perturbed evolution: admissibility gate, Born series, split stepping
cli        experiment runner (`schrodlab <subcommand> --config ...`)
"""

from .symbols import PolySymbol, check_elliptic, load_symbol, save_symbol
from .exponents import ExponentTable, compute_table

__all__ = [
    "PolySymbol",
    "check_elliptic",
    "load_symbol",
    "save_symbol",
    "ExponentTable",
    "compute_table",
]

__version__ = "0.1.0"
