"""Graphs coded as finite groups, their complete systems, and checks of the finite lemmas."""

from .codec import Graph, decode, decode_structured, encode, parse_graph, read_graph
from .core import DpElement, Params, StructuredElement, StructuredGroup, WElement
from .errors import BudgetError, CdmError, ClosureError, ContractError, LabelError, ParamError, ParseError
from .finite import FiniteGroup
from .lemmas import LemmaReport, check_bounding, verify
from .logic import evaluate, parse_formula
from .subgroups import NormalSubgroup, enumerate_normal, iso_tag
from .system import System, build_system
from .width import INFINITE, gcl, vertex_width

__all__ = [
    "Graph", "decode", "decode_structured", "encode", "parse_graph", "read_graph",
    "DpElement", "Params", "StructuredElement", "StructuredGroup", "WElement",
    "BudgetError", "CdmError", "ClosureError", "ContractError", "LabelError", "ParamError", "ParseError",
    "FiniteGroup", "LemmaReport", "check_bounding", "verify", "evaluate", "parse_formula",
    "NormalSubgroup", "enumerate_normal", "iso_tag", "System", "build_system", "INFINITE", "gcl", "vertex_width",
]
__version__ = "0.1.0"
