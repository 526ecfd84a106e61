"""Numerical tools for the Birkhoff polytope.

Bracelet conditions, unistochasticity certificates, factorisable-matrix
algebra and the hypocycloid geometry of circulant spectra.
"""
from .core import (
    BistochasticMatrix,
    CirculantVector,
    SpectrumSet,
    Tolerances,
    UnitaryWitness,
    circulant_eigenvalues,
    circulant_to_matrix,
    cyclic_permutation,
    flat_matrix,
    identity,
    make_bistochastic,
    multiply,
)
from .bracelet import BraceletReport, ElementaryFactor, compose_factors, is_bracelet
from .unistochastic import Certificate, Verdict, certify
from .spectra import HypocycloidRegion

__all__ = [
    "BistochasticMatrix",
    "BraceletReport",
    "Certificate",
    "CirculantVector",
    "ElementaryFactor",
    "HypocycloidRegion",
    "SpectrumSet",
    "Tolerances",
    "UnitaryWitness",
    "Verdict",
    "certify",
    "circulant_eigenvalues",
    "circulant_to_matrix",
    "compose_factors",
    "cyclic_permutation",
    "flat_matrix",
    "identity",
    "is_bracelet",
    "make_bistochastic",
    "multiply",
]

__version__ = "0.1.0"
