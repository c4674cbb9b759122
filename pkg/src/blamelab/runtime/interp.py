"""Call-by-need evaluator.

One `Interp` owns the state of a single run: the strategy for union and
intersection checks, the force counters used by the laziness tests, and any
viability cells allocated along the way.  Interpreter state must not be
shared across concurrent runs; independent runs are safe in parallel.
"""
from __future__ import annotations

import json
from typing import Callable

from .. import contracts as ct
from ..connectives import Strategy
from ..syntax import ast
from ..syntax.ast import Span, Term
from .values import (
    CYCLE_ERROR, DIVISION_BY_ZERO, FALSE, NULL, TRUE, TYPE_ERROR,
    UNBOUND_VARIABLE, ArrayV, BlameSignal, BoolV, ClosureV, ContractV,
    CrashSignal, Env, ExportError, GuardedFnV, NullV, NumV, PrimV, RecordV,
    StrV, Thunk, Value, applicable, type_name,
)
from .values import _EVALUATED, _FAILED, _IN_PROGRESS  # type: ignore[attr-defined]


def _crash(span: Span | None, message: str, kind: str = TYPE_ERROR) -> CrashSignal:
    return CrashSignal(kind, span, message)


class Interp:
    """A single evaluation run."""

    def __init__(self, strategy: Strategy = Strategy.STATEFUL):
        self.strategy = strategy
        self.forces = 0  # number of thunk evaluations performed in this run

    # -- thunks -------------------------------------------------------------

    def force(self, thunk: Thunk) -> Value:
        """Evaluate a thunk to weak-head normal form, memoizing the result.

        Both values and failures are memoized: re-forcing never re-evaluates.
        """
        if thunk.state == _EVALUATED:
            return thunk.value  # type: ignore[return-value]
        if thunk.state == _FAILED:
            raise thunk.failure  # type: ignore[misc]
        if thunk.state == _IN_PROGRESS:
            raise _crash(thunk.span(), "cyclic dependency while forcing a value",
                         CYCLE_ERROR)
        thunk.state = _IN_PROGRESS
        thunk.evals += 1
        self.forces += 1
        try:
            if thunk.compute is not None:
                value = thunk.compute()
            else:
                value = self.eval_term(thunk.term, thunk.env)  # type: ignore[arg-type]
        except (BlameSignal, CrashSignal) as failure:
            thunk.state = _FAILED
            thunk.failure = failure
            raise
        thunk.state = _EVALUATED
        thunk.value = value
        return value

    # -- evaluation ----------------------------------------------------------

    def eval_term(self, t: Term, env: Env) -> Value:
        if isinstance(t, ast.NumLit):
            return NumV(t.value)
        if isinstance(t, ast.StrLit):
            return StrV(t.value)
        if isinstance(t, ast.BoolLit):
            return TRUE if t.value else FALSE
        if isinstance(t, ast.NullLit):
            return NULL
        if isinstance(t, ast.Var):
            thunk = env.lookup(t.name)
            if thunk is None:
                raise _crash(t.span, f"unbound variable {t.name!r}", UNBOUND_VARIABLE)
            return self.force(thunk)
        if isinstance(t, ast.ArrayLit):
            return ArrayV(tuple(Thunk.from_term(e, env) for e in t.elements))
        if isinstance(t, ast.RecordLit):
            # Fields are packed unevaluated; they do not see their siblings.
            return RecordV({n: Thunk.from_term(e, env) for n, e in t.fields})
        if isinstance(t, ast.FieldAccess):
            rec = self.eval_term(t.record, env)
            if not isinstance(rec, RecordV):
                raise _crash(t.span, f"field access on {type_name(rec)}, expected Record")
            thunk = rec.fields.get(t.name)
            if thunk is None:
                raise _crash(t.span, f"record has no field {t.name!r}")
            return self.force(thunk)
        if isinstance(t, ast.Fun):
            return ClosureV(t.params, t.body, env)
        if isinstance(t, ast.Let):
            bound = t.bound
            if t.contract is not None:
                bound = ast.Annot(t.contract.span.cover(bound.span), bound, t.contract)
            thunk = Thunk.from_term(bound, env)
            return self.eval_term(t.body, env.extend(t.name, thunk))
        if isinstance(t, ast.If):
            cond = self.eval_term(t.cond, env)
            if not isinstance(cond, BoolV):
                raise _crash(t.cond.span, f"if condition has type {type_name(cond)}, "
                                          "but Bool was expected")
            return self.eval_term(t.then if cond.value else t.orelse, env)
        if isinstance(t, ast.App):
            fn = self.eval_term(t.fn, env)
            return self.apply(fn, Thunk.from_term(t.arg, env), t.span)
        if isinstance(t, ast.BinOp):
            return self._binop(t, env)
        if isinstance(t, ast.Annot):
            contract = self.eval_contract(t.contract, env)
            # The label points at the contract expression ("bound here").
            label = ct.Label(span=t.contract.span, contract_repr=ct.describe(contract))
            wrapped = ct.attach(self, Thunk.from_term(t.expr, env), contract, label)
            return self.force(wrapped)
        if isinstance(t, ast.ContractCtor):
            return ContractV(self._eval_ctor(t, env))
        raise _crash(t.span, f"cannot evaluate {type(t).__name__}")

    def eval(self, t: Term, env: Env | None = None):
        """Evaluate a term to an Outcome (success, blame, or crash)."""
        from .values import Blame, Crash, Success
        try:
            return Success(self.eval_term(t, env if env is not None else prelude_env()))
        except BlameSignal as b:
            return Blame(b.report)
        except CrashSignal as c:
            return Crash(c.kind, c.span, c.message)

    # -- contracts -----------------------------------------------------------

    def eval_contract(self, t: Term, env: Env) -> ct.Contract:
        value = self.eval_term(t, env)
        if not isinstance(value, ContractV):
            raise _crash(t.span, f"expected a contract, got {type_name(value)}")
        contract = value.contract
        # Christen anonymous predicate contracts after the variable that
        # delivered them, so reports read `Positive`, not `<predicate>`.
        if isinstance(t, ast.Var) and isinstance(contract, ct.Flat) and contract.name is None:
            contract.name = t.name
        return contract

    def _eval_ctor(self, t: ast.ContractCtor, env: Env) -> ct.Contract:
        if isinstance(t, ast.BuiltinContract):
            return BUILTIN_CONTRACTS[t.kind]
        if isinstance(t, ast.FromPred):
            pred = self.eval_term(t.pred, env)
            if not applicable(pred):
                raise _crash(t.span, "contracts.fromPred needs a predicate function")
            return ct.Flat(pred)
        if isinstance(t, ast.ArrowCtor):
            return ct.Arrow(self.eval_contract(t.domain, env),
                            self.eval_contract(t.codomain, env))
        if isinstance(t, ast.UnionCtor):
            return ct.Union(self._connective_branches(t, env, ct.Union))
        if isinstance(t, ast.IntersectionCtor):
            return ct.Intersection(self._connective_branches(t, env, ct.Intersection))
        if isinstance(t, ast.CaseCtor):
            branches = []
            for b in t.branches:
                c = self.eval_contract(b, env)
                if not isinstance(c, ct.Arrow):
                    raise _crash(b.span, "Case branches must be arrow contracts")
                branches.append(c)
            return ct.CaseArrow(tuple(branches))
        if isinstance(t, ast.RecordOfCtor):
            return ct.RecordOf({n: self.eval_contract(c, env) for n, c in t.fields})
        if isinstance(t, ast.ArrayOfCtor):
            return ct.ArrayOf(self.eval_contract(t.element, env))
        raise _crash(t.span, f"cannot evaluate {type(t).__name__}")

    def _connective_branches(self, t, env: Env, kind) -> tuple[ct.Contract, ...]:
        # `A @| B @| C` is right-nested in the syntax; directly nested
        # connectives of the same kind flatten into one n-ary attachment.
        branches: list[ct.Contract] = []
        for side in (t.left, t.right):
            c = self.eval_contract(side, env)
            if isinstance(c, kind):
                branches.extend(c.branches)
            else:
                branches.append(c)
        return tuple(branches)

    # -- application -----------------------------------------------------------

    def apply(self, fn: Value, arg: Thunk, span: Span) -> Value:
        if isinstance(fn, ClosureV):
            env = fn.env.extend(fn.params[0], arg)
            if len(fn.params) == 1:
                return self.eval_term(fn.body, env)
            return ClosureV(fn.params[1:], fn.body, env)
        if isinstance(fn, PrimV):
            args = fn.args + (arg,)
            if len(args) == fn.arity:
                return fn.fn(self, span, *args)
            return PrimV(fn.name, fn.arity, fn.fn, args)
        if isinstance(fn, GuardedFnV):
            return fn.guard.apply(self, fn.inner, arg, span)
        raise _crash(span, f"cannot apply {type_name(fn)}, expected Fun")

    # -- operators ---------------------------------------------------------------

    def _binop(self, t: ast.BinOp, env: Env) -> Value:
        op = t.op
        if op in ("&&", "||"):
            lhs = self.eval_term(t.lhs, env)
            if not isinstance(lhs, BoolV):
                raise _crash(t.lhs.span, f"{op} expects Bool, got {type_name(lhs)}")
            if op == "&&" and not lhs.value:
                return FALSE
            if op == "||" and lhs.value:
                return TRUE
            rhs = self.eval_term(t.rhs, env)
            if not isinstance(rhs, BoolV):
                raise _crash(t.rhs.span, f"{op} expects Bool, got {type_name(rhs)}")
            return rhs
        lhs = self.eval_term(t.lhs, env)
        rhs = self.eval_term(t.rhs, env)
        if op == "==":
            return BoolV(self.structural_eq(lhs, rhs, t.span))
        if op == "++":
            if isinstance(lhs, StrV) and isinstance(rhs, StrV):
                return StrV(lhs.value + rhs.value)
            if isinstance(lhs, ArrayV) and isinstance(rhs, ArrayV):
                return ArrayV(lhs.elements + rhs.elements)
            bad = rhs if isinstance(lhs, (StrV, ArrayV)) else lhs
            raise _crash(t.span, "++ expects two Str or two Array operands, "
                                 f"but this expression has type {type_name(bad)}")
        if not isinstance(lhs, NumV) or not isinstance(rhs, NumV):
            bad = lhs if not isinstance(lhs, NumV) else rhs
            raise _crash(t.span, f"{op} expects Num operands, got {type_name(bad)}")
        a, b = lhs.value, rhs.value
        if op == "+":
            return NumV(a + b)
        if op == "-":
            return NumV(a - b)
        if op == "*":
            return NumV(a * b)
        if op == "/":
            if b == 0:
                raise _crash(t.span, "division by zero", DIVISION_BY_ZERO)
            return NumV(a / b)
        if op == "<":
            return BoolV(a < b)
        if op == "<=":
            return BoolV(a <= b)
        if op == ">":
            return BoolV(a > b)
        if op == ">=":
            return BoolV(a >= b)
        raise _crash(t.span, f"unknown operator {op!r}")

    def structural_eq(self, a: Value, b: Value, span: Span | None) -> bool:
        """Deep equality on first-order values; comparing functions crashes."""
        if applicable(a) or applicable(b) or isinstance(a, ContractV) or isinstance(b, ContractV):
            raise _crash(span, "cannot compare functions or contracts with ==")
        if type(a) is not type(b):
            return False
        if isinstance(a, (NumV, StrV, BoolV)):
            return a.value == b.value  # type: ignore[union-attr]
        if isinstance(a, NullV):
            return True
        if isinstance(a, ArrayV):
            if len(a.elements) != len(b.elements):  # type: ignore[union-attr]
                return False
            return all(self.structural_eq(self.force(x), self.force(y), span)
                       for x, y in zip(a.elements, b.elements))  # type: ignore[union-attr]
        if isinstance(a, RecordV):
            if set(a.fields) != set(b.fields):  # type: ignore[union-attr]
                return False
            return all(self.structural_eq(self.force(a.fields[n]),
                                          self.force(b.fields[n]), span)  # type: ignore[union-attr]
                       for n in a.fields)
        return False

    # -- export -------------------------------------------------------------------

    def export_json(self, v: Value) -> str:
        """Deep-force a value and serialize it as compact JSON.

        Record fields are sorted for determinism.  Functions and contracts
        have no JSON form and raise ExportError.
        """
        return json.dumps(self._to_plain(v), sort_keys=True,
                          separators=(",", ":"), ensure_ascii=False)

    def _to_plain(self, v: Value):
        if isinstance(v, NumV):
            x = v.value
            if x != x or x in (float("inf"), float("-inf")):
                raise ExportError(f"{x!r} has no JSON form")
            return int(x) if x == int(x) else x
        if isinstance(v, StrV):
            return v.value
        if isinstance(v, BoolV):
            return v.value
        if isinstance(v, NullV):
            return None
        if isinstance(v, ArrayV):
            return [self._to_plain(self.force(t)) for t in v.elements]
        if isinstance(v, RecordV):
            return {n: self._to_plain(self.force(t)) for n, t in v.fields.items()}
        raise ExportError(f"{type_name(v)} has no JSON form")


# ---------------------------------------------------------------------------
# Builtin type contracts


def _shape_flat(name: str, cls) -> ct.Flat:
    def check(interp: Interp, span: Span, t: Thunk) -> Value:
        return BoolV(isinstance(interp.force(t), cls))
    return ct.Flat(PrimV(f"is{name}", 1, check), name)


BUILTIN_CONTRACTS: dict[str, ct.Contract] = {
    "Num": _shape_flat("Num", NumV),
    "Str": _shape_flat("Str", StrV),
    "Bool": _shape_flat("Bool", BoolV),
    "Dyn": ct.DYN,
}


# ---------------------------------------------------------------------------
# Primitives


def _prim(name: str, arity: int, fn: Callable[..., Value]) -> Thunk:
    return Thunk.from_value(PrimV(name, arity, fn))


def _need_array(interp: Interp, t: Thunk, span: Span, who: str) -> ArrayV:
    v = interp.force(t)
    if not isinstance(v, ArrayV):
        raise _crash(span, f"{who} expects an Array, got {type_name(v)}")
    return v


def _need_bool(v: Value, span: Span, who: str) -> bool:
    if not isinstance(v, BoolV):
        raise _crash(span, f"{who} expects its predicate to return Bool, "
                           f"got {type_name(v)}")
    return v.value


def _lists_head(interp: Interp, span: Span, arr_t: Thunk) -> Value:
    arr = _need_array(interp, arr_t, span, "lists.head")
    if not arr.elements:
        raise _crash(span, "lists.head of an empty array")
    return interp.force(arr.elements[0])


def _lists_tail(interp: Interp, span: Span, arr_t: Thunk) -> Value:
    arr = _need_array(interp, arr_t, span, "lists.tail")
    if not arr.elements:
        raise _crash(span, "lists.tail of an empty array")
    return ArrayV(arr.elements[1:])


def _lists_cons(interp: Interp, span: Span, head_t: Thunk, arr_t: Thunk) -> Value:
    arr = _need_array(interp, arr_t, span, "lists.cons")
    return ArrayV((head_t,) + arr.elements)


def _lists_length(interp: Interp, span: Span, arr_t: Thunk) -> Value:
    return NumV(float(len(_need_array(interp, arr_t, span, "lists.length").elements)))


def _lists_any(interp: Interp, span: Span, pred_t: Thunk, arr_t: Thunk) -> Value:
    pred = interp.force(pred_t)
    arr = _need_array(interp, arr_t, span, "lists.any")
    for el in arr.elements:
        if _need_bool(interp.apply(pred, el, span), span, "lists.any"):
            return TRUE
    return FALSE


def _lists_fold(interp: Interp, span: Span, fn_t: Thunk, arr_t: Thunk, init_t: Thunk) -> Value:
    # Right fold: fold f [a, b] init = f a (f b init); the accumulator stays
    # a thunk, so f can ignore it without forcing the rest.
    fn = interp.force(fn_t)
    arr = _need_array(interp, arr_t, span, "lists.fold")

    def go(i: int) -> Value:
        if i == len(arr.elements):
            return interp.force(init_t)
        partial = interp.apply(fn, arr.elements[i], span)
        rest = Thunk.from_compute(lambda: go(i + 1))
        return interp.apply(partial, rest, span)

    return go(0)


def _lists_elem_at(interp: Interp, span: Span, idx_t: Thunk, arr_t: Thunk) -> Value:
    idx = interp.force(idx_t)
    arr = _need_array(interp, arr_t, span, "lists.elemAt")
    if not isinstance(idx, NumV) or idx.value != int(idx.value):
        raise _crash(span, "lists.elemAt expects an integer index")
    i = int(idx.value)
    if not 0 <= i < len(arr.elements):
        raise _crash(span, f"lists.elemAt index {i} out of range")
    return interp.force(arr.elements[i])


def _num_is_int(interp: Interp, span: Span, t: Thunk) -> Value:
    # Total on purpose: non-numbers are simply not integers.  This keeps
    # user predicates like `num.isInt p && 0 <= p` usable as contracts on
    # arbitrary values.
    v = interp.force(t)
    return BoolV(isinstance(v, NumV) and v.value == int(v.value))


def _contracts_from_pred(interp: Interp, span: Span, pred_t: Thunk) -> Value:
    pred = interp.force(pred_t)
    if not applicable(pred):
        raise _crash(span, "contracts.fromPred needs a predicate function")
    return ContractV(ct.Flat(pred))


_PRELUDE: Env | None = None


def prelude_env() -> Env:
    """Shared immutable environment with the standard library records."""
    global _PRELUDE
    if _PRELUDE is None:
        lists = RecordV({
            "head": _prim("lists.head", 1, _lists_head),
            "tail": _prim("lists.tail", 1, _lists_tail),
            "cons": _prim("lists.cons", 2, _lists_cons),
            "any": _prim("lists.any", 2, _lists_any),
            "fold": _prim("lists.fold", 3, _lists_fold),
            "length": _prim("lists.length", 1, _lists_length),
            "elemAt": _prim("lists.elemAt", 2, _lists_elem_at),
        })
        num = RecordV({"isInt": _prim("num.isInt", 1, _num_is_int)})
        contracts_rec = RecordV({"fromPred": _prim("contracts.fromPred", 1,
                                                   _contracts_from_pred)})
        _PRELUDE = Env({
            "lists": Thunk.from_value(lists),
            "num": Thunk.from_value(num),
            "contracts": Thunk.from_value(contracts_rec),
        })
    return _PRELUDE
