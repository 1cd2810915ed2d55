"""spineforge: decorated special polyhedra and their hyperbolic block decompositions."""

__version__ = "0.1.0"
