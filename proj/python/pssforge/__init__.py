"""Symbolic verification of evolution equations describing pseudospherical and spherical surfaces.

Expressions are strings in the toolkit syntax. Coframes, equations and branch
specifications are plain dicts in the JSON exchange format.
"""

import json

from . import _core
from ._core import (
    ConstraintError,
    ExprError,
    FormatError,
    NumericError,
    ParseError,
    SeriesError,
    eval_numeric,
    normalize,
    partial,
    substitute,
    to_latex,
    total_dt,
    total_dx,
)

__all__ = [
    "ConstraintError",
    "ExprError",
    "FormatError",
    "NumericError",
    "ParseError",
    "SeriesError",
    "catalog",
    "catalog_names",
    "conservation",
    "construct",
    "curvature",
    "eval_numeric",
    "normalize",
    "partial",
    "properties",
    "substitute",
    "to_latex",
    "total_dt",
    "total_dx",
    "verify",
]


def catalog_names():
    return list(_core.catalog_names())


def catalog(name):
    """Catalog entry as a dict with name, coframe and equation."""
    return json.loads(_core.catalog(name))


def construct(spec):
    """Family instance for a branch specification dict."""
    return json.loads(_core.construct(json.dumps(spec)))


def verify(coframe, equation, zcr=False):
    """Structure residuals, nondegeneracy and an overall pass flag."""
    return json.loads(_core.verify(json.dumps(coframe), json.dumps(equation), zcr))


def conservation(coframe, equation, variable="eta", order=2, center="infinity"):
    """Closed-form check and the first series conserved pairs."""
    return json.loads(_core.conservation(json.dumps(coframe), json.dumps(equation), variable, order, center))


def curvature(entry, solution, nx=400, nt=400):
    """Numeric Gaussian curvature check on a preset solution."""
    return json.loads(_core.curvature(entry, solution, nx, nt))


def properties(cases=100, seed=20240521):
    """Randomized algebraic property checks."""
    return json.loads(_core.properties(cases, seed))
