"""Finite model finding for quantified formulas over uninterpreted sorts."""

from ._kernels import BACKEND
from .driver import SolveResult, SolverConfig, solve, solve_mace, validate_model
from .kernel import Clause, Literal, Sort, Term, TermBank
from .parser import ParseError, Script, parse
from .purifier import PurifiedProblem, Purifier, purify

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Clause", "Literal", "ParseError", "PurifiedProblem", "Purifier",
    "Script", "SolveResult", "SolverConfig", "Sort", "Term", "TermBank", "parse",
    "purify", "solve", "solve_mace", "validate_model",
]
