"""blamelab: a lazy configuration language with first-class contracts.

The interpreter ships three interchangeable semantics for union and
intersection contracts (naive, arity-dispatched, and stateful shared
viability) so their trade-offs can be observed on real programs.
"""
from .api import (
    DEFAULT_STRATEGY, DiffResult, DnfEntry, EXIT_BLAME, EXIT_CRASH,
    EXIT_PARSE, EXIT_SUCCESS, RunResult, TransformResult, diff_sources,
    dnf_report, export_source, run_source, transform_source,
)
from .connectives import Strategy, ViabilityCell, contract_arity, dnf_normalize, mark_branch_dead
from .contracts import BlameReport, Contract, Label, attach, check_flat, negate, raise_blame, wrap_arrow
from .runtime.interp import Interp, prelude_env
from .runtime.values import Blame, Crash, Outcome, Success, Thunk
from .syntax import parse_program, pretty, tokenize
from .transform import DiffVerdict, TransformReport, compare_behaviors, cse, inline

__version__ = "0.1.0"

__all__ = [
    "Blame", "BlameReport", "Contract", "Crash", "DEFAULT_STRATEGY",
    "DiffResult", "DiffVerdict", "DnfEntry", "EXIT_BLAME", "EXIT_CRASH",
    "EXIT_PARSE", "EXIT_SUCCESS", "Interp", "Label", "Outcome", "RunResult",
    "Strategy", "Success", "Thunk", "TransformReport", "TransformResult",
    "ViabilityCell", "attach", "check_flat", "compare_behaviors",
    "contract_arity", "cse", "diff_sources", "dnf_normalize", "dnf_report",
    "export_source", "inline", "mark_branch_dead", "negate", "parse_program",
    "pretty", "prelude_env", "raise_blame", "run_source", "tokenize",
    "transform_source", "wrap_arrow",
]
