"""Exact homological algebra: Koszul complexes and local cohomology, Tate
lattices, Chevalley-Eilenberg complexes of dg-Lie algebras and truncated
higher loop spaces."""

__version__ = "0.1.0"
