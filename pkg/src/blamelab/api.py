"""High-level operations over whole programs.

Everything here takes source text in and gives structured results out; file
handling, HTTP and exit codes live with the callers (service and CLI).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import contracts as ct
from .connectives import Strategy, dnf_normalize
from .runtime.interp import Interp, prelude_env
from .runtime.values import (
    Blame, BlameSignal, Crash, CrashSignal, ExportError, Outcome, Success,
)
from .syntax import LexError, ParseError, parse_program, pretty
from .syntax import ast
from .transform import (
    DiffVerdict, TransformReport, UnknownBinding, compare_behaviors, cse,
    describe_outcome, inline,
)

EXIT_SUCCESS = 0
EXIT_BLAME = 1
EXIT_CRASH = 2
EXIT_PARSE = 3

DEFAULT_STRATEGY = Strategy.STATEFUL


@dataclass(frozen=True)
class RunResult:
    status: str  # "success" | "blame" | "crash" | "parse-error"
    exit_code: int
    rendered: str
    json_value: str | None = None
    outcome: Outcome | None = None

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_SUCCESS


def render_crash(kind: str, span, message: str, source: str | None) -> str:
    lines = [f"error: {kind}"]
    if span is not None:
        lines.append(f" --> {span.location()}")
        if source is not None:
            lines.extend(ct._excerpt(span, source))
    lines.append(f"  {message}")
    return "\n".join(lines)


def run_source(source: str, strategy: Strategy = DEFAULT_STRATEGY,
               filename: str = "<input>") -> RunResult:
    """Parse and evaluate a program to its final configuration; never raises.

    The result is deep-forced: delayed checks buried in record fields or
    array elements count against the program, exactly as they would when
    the configuration is exported.  Function results are legal but render
    as an opaque value.
    """
    try:
        term = parse_program(source, filename)
    except (LexError, ParseError) as e:
        return RunResult("parse-error", EXIT_PARSE, str(e))
    interp = Interp(strategy)
    exported: str | None = None
    try:
        value = interp.eval_term(term, prelude_env())
        try:
            exported = interp.export_json(value)
        except ExportError:
            exported = None
    except BlameSignal as b:
        return RunResult("blame", EXIT_BLAME, b.report.render(source),
                         outcome=Blame(b.report))
    except CrashSignal as c:
        return RunResult("crash", EXIT_CRASH,
                         render_crash(c.kind, c.span, c.message, source),
                         outcome=Crash(c.kind, c.span, c.message))
    rendered = exported if exported is not None else ct.render_value(value)
    return RunResult("success", EXIT_SUCCESS, rendered, json_value=exported,
                     outcome=Success(value))


def export_source(source: str, strategy: Strategy = DEFAULT_STRATEGY,
                  filename: str = "<input>") -> RunResult:
    """Evaluate and deep-force a program into its JSON configuration."""
    try:
        term = parse_program(source, filename)
    except (LexError, ParseError) as e:
        return RunResult("parse-error", EXIT_PARSE, str(e))
    interp = Interp(strategy)
    try:
        value = interp.eval_term(term, prelude_env())
        exported = interp.export_json(value)
    except BlameSignal as b:
        return RunResult("blame", EXIT_BLAME, b.report.render(source),
                         outcome=Blame(b.report))
    except CrashSignal as c:
        return RunResult("crash", EXIT_CRASH,
                         render_crash(c.kind, c.span, c.message, source),
                         outcome=Crash(c.kind, c.span, c.message))
    except ExportError as e:
        return RunResult("crash", EXIT_CRASH, f"error: ExportError\n  {e}",
                         outcome=Crash("ExportError", None, str(e)))
    return RunResult("success", EXIT_SUCCESS, exported, json_value=exported,
                     outcome=Success(value))


@dataclass(frozen=True)
class DiffResult:
    verdict: str
    detail: str
    exit_code: int


def diff_sources(source_a: str, source_b: str,
                 strategy: Strategy = DEFAULT_STRATEGY,
                 file_a: str = "<a>", file_b: str = "<b>") -> DiffResult:
    try:
        term_a = parse_program(source_a, file_a)
        term_b = parse_program(source_b, file_b)
    except (LexError, ParseError) as e:
        return DiffResult("parse-error", str(e), EXIT_PARSE)
    verdict: DiffVerdict = compare_behaviors(term_a, term_b, strategy)
    return DiffResult(verdict.verdict, verdict.detail, EXIT_SUCCESS)


@dataclass(frozen=True)
class DnfEntry:
    location: str
    original: str
    normalized: str


def dnf_report(source: str, filename: str = "<input>") -> list[DnfEntry] | RunResult:
    """Normalized form of the contract at every annotation site."""
    try:
        term = parse_program(source, filename)
    except (LexError, ParseError) as e:
        return RunResult("parse-error", EXIT_PARSE, str(e))
    entries: list[DnfEntry] = []

    def walk(t: ast.Term) -> None:
        if isinstance(t, ast.Annot):
            entries.append(DnfEntry(t.contract.span.location(),
                                    pretty(t.contract),
                                    pretty(dnf_normalize(t.contract))))
        for c in ast.children(t):
            walk(c)

    walk(term)
    return entries


@dataclass(frozen=True)
class TransformResult:
    status: str
    rendered: str
    exit_code: int
    sites: tuple[str, ...] = ()


def transform_source(source: str, pass_name: str, inline_name: str | None = None,
                     filename: str = "<input>") -> TransformResult:
    try:
        term = parse_program(source, filename)
    except (LexError, ParseError) as e:
        return TransformResult("parse-error", str(e), EXIT_PARSE)
    if pass_name == "cse":
        report: TransformReport = cse(term)
    elif pass_name == "inline":
        if not inline_name:
            return TransformResult("error", "inline pass needs a binding name "
                                            "(use --pass inline:<name>)", EXIT_CRASH)
        try:
            report = inline(term, inline_name)
        except UnknownBinding as e:
            return TransformResult("error", str(e), EXIT_CRASH)
    else:
        return TransformResult("error", f"unknown pass {pass_name!r}", EXIT_CRASH)
    sites = tuple(s.location() for s in report.sites)
    return TransformResult("ok", pretty(report.transformed), EXIT_SUCCESS, sites)


__all__ = [
    "DEFAULT_STRATEGY", "DiffResult", "DnfEntry", "EXIT_BLAME", "EXIT_CRASH",
    "EXIT_PARSE", "EXIT_SUCCESS", "RunResult", "Strategy", "TransformResult",
    "describe_outcome", "diff_sources", "dnf_report", "export_source",
    "run_source", "transform_source",
]
