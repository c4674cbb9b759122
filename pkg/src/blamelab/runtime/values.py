"""Runtime values, thunks, environments and outcomes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..syntax.ast import Span, Term

# Crash kinds.  Crashes are dynamic errors not mediated by a contract.
TYPE_ERROR = "TypeError"
CYCLE_ERROR = "CycleError"
DIVISION_BY_ZERO = "DivisionByZero"
UNBOUND_VARIABLE = "UnboundVariable"
AMBIGUOUS_UNION = "AmbiguousUnion"

POSITIVE = "positive"  # implementation / value at fault
NEGATIVE = "negative"  # caller / context at fault


class CrashSignal(Exception):
    def __init__(self, kind: str, span: Span | None, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.span = span
        self.message = message


class BlameSignal(Exception):
    """Raised when a contract check fails; carries a BlameReport."""

    def __init__(self, report: Any):
        super().__init__(str(report))
        self.report = report


class ExportError(Exception):
    pass


class Value:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class NumV(Value):
    value: float


@dataclass(frozen=True, slots=True)
class StrV(Value):
    value: str


@dataclass(frozen=True, slots=True)
class BoolV(Value):
    value: bool


@dataclass(frozen=True, slots=True)
class NullV(Value):
    pass


@dataclass(frozen=True, slots=True)
class ArrayV(Value):
    elements: tuple["Thunk", ...]


@dataclass(frozen=True, slots=True)
class RecordV(Value):
    fields: dict[str, "Thunk"]


@dataclass(frozen=True, slots=True)
class ClosureV(Value):
    params: tuple[str, ...]
    body: Term
    env: "Env"


@dataclass(frozen=True, slots=True)
class PrimV(Value):
    """Curried primitive; one argument consumed per application."""

    name: str
    arity: int
    fn: Callable[..., Value]
    args: tuple["Thunk", ...] = ()


@dataclass(frozen=True, slots=True)
class GuardedFnV(Value):
    """A function wrapped by a delayed contract check."""

    inner: Value
    guard: Any  # object with apply(interp, inner, arg_thunk, call_span)


@dataclass(frozen=True, slots=True)
class ContractV(Value):
    contract: Any


NULL = NullV()
TRUE = BoolV(True)
FALSE = BoolV(False)


def applicable(v: Value) -> bool:
    return isinstance(v, (ClosureV, PrimV, GuardedFnV))


def declared_arity(v: Value) -> int:
    """Parameter count used for arity-based union dispatch.

    Closures report their remaining parameter count; primitives consume one
    argument at a time, so they report 1; guards are transparent.
    """
    if isinstance(v, ClosureV):
        return len(v.params)
    if isinstance(v, PrimV):
        return 1
    if isinstance(v, GuardedFnV):
        return declared_arity(v.inner)
    raise ValueError("declared_arity of a non-function value")


def type_name(v: Value) -> str:
    return {
        NumV: "Num", StrV: "Str", BoolV: "Bool", NullV: "Null",
        ArrayV: "Array", RecordV: "Record", ClosureV: "Fun", PrimV: "Fun",
        GuardedFnV: "Fun", ContractV: "Contract",
    }[type(v)]


class Env:
    """Immutable chained environment mapping names to thunks."""

    __slots__ = ("_frame", "_parent")

    def __init__(self, frame: dict[str, "Thunk"] | None = None, parent: "Env | None" = None):
        self._frame = frame or {}
        self._parent = parent

    def lookup(self, name: str) -> "Thunk | None":
        env: Env | None = self
        while env is not None:
            t = env._frame.get(name)
            if t is not None:
                return t
            env = env._parent
        return None

    def extend(self, name: str, thunk: "Thunk") -> "Env":
        return Env({name: thunk}, self)

    def extend_many(self, frame: dict[str, "Thunk"]) -> "Env":
        return Env(dict(frame), self)


_UNEVALUATED, _IN_PROGRESS, _EVALUATED, _FAILED = range(4)


class Thunk:
    """Delayed computation with memoized result (or memoized failure)."""

    __slots__ = ("state", "term", "env", "compute", "value", "failure", "evals")

    def __init__(self) -> None:
        self.state = _UNEVALUATED
        self.term: Term | None = None
        self.env: Env | None = None
        self.compute: Callable[[], Value] | None = None
        self.value: Value | None = None
        self.failure: BaseException | None = None
        self.evals = 0

    @classmethod
    def from_term(cls, term: Term, env: Env) -> "Thunk":
        t = cls()
        t.term = term
        t.env = env
        return t

    @classmethod
    def from_value(cls, v: Value) -> "Thunk":
        t = cls()
        t.state = _EVALUATED
        t.value = v
        return t

    @classmethod
    def from_compute(cls, compute: Callable[[], Value], term: Term | None = None) -> "Thunk":
        t = cls()
        t.compute = compute
        t.term = term
        return t

    @property
    def is_evaluated(self) -> bool:
        return self.state == _EVALUATED

    @property
    def is_failed(self) -> bool:
        return self.state == _FAILED

    def span(self) -> Span | None:
        return self.term.span if self.term is not None else None


@dataclass(frozen=True)
class Success:
    value: Value


@dataclass(frozen=True)
class Blame:
    report: Any  # BlameReport

    @property
    def polarity(self) -> str:
        return self.report.label.polarity


@dataclass(frozen=True)
class Crash:
    kind: str
    span: Span | None
    message: str


Outcome = Success | Blame | Crash
