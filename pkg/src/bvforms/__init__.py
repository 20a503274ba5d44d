"""Differential forms on odd symplectic superspace and the BV operator."""

from .core import AlgebraContext, ContextMismatch, Gen, Kind, Monomial, MultiDegree, SuperForm, contract, mul, partial_left
from .expr import ParseError, format_form, parse, parse_form
from .operators import (
    ComponentAtTopAuxdeg,
    HbarForm,
    NotClosed,
    NotExact,
    bv_delta,
    canonical_rep,
    d,
    hbar_d,
    homotopy_L,
    invert_omega,
    omega,
    omega_wedge,
    top_form,
)

__all__ = [
    "AlgebraContext",
    "ContextMismatch",
    "Gen",
    "Kind",
    "Monomial",
    "MultiDegree",
    "SuperForm",
    "contract",
    "mul",
    "partial_left",
    "ParseError",
    "format_form",
    "parse",
    "parse_form",
    "ComponentAtTopAuxdeg",
    "HbarForm",
    "NotClosed",
    "NotExact",
    "bv_delta",
    "canonical_rep",
    "d",
    "hbar_d",
    "homotopy_L",
    "invert_omega",
    "omega",
    "omega_wedge",
    "top_form",
]

__version__ = "0.1.0"
