from .interp import InconsistentData, UPoly, interpolate
from .locrat import LocalisationError, LocRat
from .poly import (
    Alphabet,
    MPoly,
    NotDivisible,
    SymPoly,
    Variable,
    exact_divide,
    format_poly,
    power_sum,
    sym_check,
    symmetrize,
    vandermonde,
)
from .series import GradedSeries, LaurentSeries, box, format_laurent

__all__ = [
    "Alphabet", "GradedSeries", "InconsistentData", "LaurentSeries", "LocRat", "LocalisationError",
    "MPoly", "NotDivisible", "SymPoly", "UPoly", "Variable", "box", "exact_divide", "format_laurent",
    "format_poly", "interpolate", "power_sum", "sym_check", "symmetrize", "vandermonde",
]
