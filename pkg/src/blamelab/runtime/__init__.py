from .values import (
    AMBIGUOUS_UNION, CYCLE_ERROR, DIVISION_BY_ZERO, NEGATIVE, POSITIVE,
    TYPE_ERROR, UNBOUND_VARIABLE, ArrayV, Blame, BlameSignal, BoolV, ClosureV,
    ContractV, Crash, CrashSignal, Env, ExportError, GuardedFnV, NullV, NumV,
    Outcome, PrimV, RecordV, StrV, Success, Thunk, Value, applicable,
    declared_arity, type_name,
)

_LAZY = ("Interp", "prelude_env", "BUILTIN_CONTRACTS")


def __getattr__(name: str):
    # interp depends on contracts/connectives; load it on first use so that
    # importing runtime.values from those modules stays cycle-free.
    if name in _LAZY:
        from . import interp
        return getattr(interp, name)
    raise AttributeError(name)


__all__ = [
    "AMBIGUOUS_UNION", "BUILTIN_CONTRACTS", "CYCLE_ERROR", "DIVISION_BY_ZERO",
    "NEGATIVE", "POSITIVE", "TYPE_ERROR", "UNBOUND_VARIABLE", "ArrayV",
    "Blame", "BlameSignal", "BoolV", "ClosureV", "ContractV", "Crash",
    "CrashSignal", "Env", "ExportError", "GuardedFnV", "Interp", "NullV",
    "NumV", "Outcome", "PrimV", "RecordV", "StrV", "Success", "Thunk",
    "Value", "applicable", "declared_arity", "prelude_env", "type_name",
]
