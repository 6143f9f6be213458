"""Shuffle-algebra model of quiver cohomological Hall algebras, with a localised
coproduct, DT extraction, and finite-field point counting."""

__version__ = "0.1.0"
