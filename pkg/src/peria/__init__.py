"""Computations with periagroups: words, Cayley balls, graph recognition, classification and growth."""

from peria.presentation import (
    PeriagroupPresentation,
    VertexGroupSpec,
    parse_presentation,
    load_presentation,
)
from peria.words import canonical_form, graphically_reduce, parse_word, format_word

__all__ = [
    "PeriagroupPresentation",
    "VertexGroupSpec",
    "parse_presentation",
    "load_presentation",
    "canonical_form",
    "graphically_reduce",
    "parse_word",
    "format_word",
]
