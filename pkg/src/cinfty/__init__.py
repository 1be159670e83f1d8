"""Certified computation with finitely presented C-infinity rings."""

from cinfty.cring import (Hom, LocalizedPresentation, Presentation, RingElement, coproduct,
                          localize, localize_set, quotient)
from cinfty.interval import Box, Interval
from cinfty.parsing import TermSyntaxError, parse_term
from cinfty.terms import Term, bump, cos, exp, sin, var
from cinfty.verdict import Kind, QueryBudget, Verdict, Witness

__version__ = "0.1.0"

__all__ = [
    "Box", "Hom", "Interval", "Kind", "LocalizedPresentation", "Presentation", "QueryBudget",
    "RingElement", "Term", "TermSyntaxError", "Verdict", "Witness", "bump", "coproduct", "cos",
    "exp", "localize", "localize_set", "parse_term", "quotient", "sin", "var",
]
