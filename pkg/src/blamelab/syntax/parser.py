"""Recursive-descent parser.

Precedence, loosest to tightest:

    | annotation, @|, @&, ->, ||, &&, comparisons, ++, + -, * /,
    application, field access

`let`, `fun` and `if` are prefix forms whose bodies extend as far right as
possible; they must be parenthesized inside operator expressions.
"""
from __future__ import annotations

from .ast import (
    Annot, App, ArrayLit, ArrayOfCtor, ArrowCtor, BinOp, BoolLit,
    BuiltinContract, CaseCtor, FieldAccess, FromPred, Fun, If,
    IntersectionCtor, Let, NullLit, NumLit, RecordLit, RecordOfCtor, Span,
    StrLit, Term, UnionCtor, Var,
)
from .lexer import Token, tokenize

# Identifiers reserved for contract constructors; they cannot be rebound.
RESERVED = frozenset({"Num", "Str", "Bool", "Dyn", "List", "Case"})

_BUILTIN = {"Num", "Str", "Bool", "Dyn"}
_ATOM_START = frozenset({"num", "str", "ident", "true", "false", "null", "(", "[", "{"})
_CMP_OPS = ("==", "<=", "<", ">=", ">")


class ParseError(Exception):
    def __init__(self, span: Span, message: str, expected: frozenset[str] = frozenset()):
        detail = f"{span.location()}: {message}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.span = span
        self.message = message
        self.expected = expected


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.span, f"unexpected {tok.kind or 'end of input'!s} {tok.text!r}",
                             frozenset({kind}))
        return self.next()

    # -- entry ------------------------------------------------------------

    def program(self) -> Term:
        t = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(tok.span, f"trailing input {tok.text!r}", frozenset({"eof"}))
        return t

    # -- expression levels -------------------------------------------------

    def expr(self) -> Term:
        tok = self.peek()
        if tok.kind == "let":
            return self.let()
        if tok.kind == "fun":
            return self.fun()
        if tok.kind == "if":
            return self.conditional()
        return self.annot()

    def let(self) -> Term:
        start = self.expect("let")
        name_tok = self.expect("ident")
        self._check_binder(name_tok)
        contract: Term | None = None
        if self.peek().kind == "|":
            self.next()
            contract = self.union()
        self.expect("=")
        bound = self.expr()
        self.expect("in")
        body = self.expr()
        span = start.span.cover(body.span)
        if contract is not None:
            # `let id | C = v in b` stands for `let id = (v | C) in b`.
            bound = Annot(contract.span.cover(bound.span), bound, contract)
        return Let(span, name_tok.text, None, bound, body)

    def fun(self) -> Term:
        start = self.expect("fun")
        params: list[str] = []
        while self.peek().kind == "ident":
            tok = self.next()
            self._check_binder(tok)
            if tok.text in params:
                raise ParseError(tok.span, f"duplicate parameter {tok.text!r}")
            params.append(tok.text)
        if not params:
            raise ParseError(self.peek().span, "fun needs at least one parameter",
                             frozenset({"ident"}))
        self.expect("=>")
        body = self.expr()
        return Fun(start.span.cover(body.span), tuple(params), body)

    def conditional(self) -> Term:
        start = self.expect("if")
        cond = self.expr()
        self.expect("then")
        then = self.expr()
        self.expect("else")
        orelse = self.expr()
        return If(start.span.cover(orelse.span), cond, then, orelse)

    def annot(self) -> Term:
        t = self.union()
        while self.peek().kind == "|":
            self.next()
            c = self.union()
            t = Annot(t.span.cover(c.span), t, c)
        return t

    def union(self) -> Term:
        t = self.inter()
        if self.peek().kind == "@|":
            self.next()
            rhs = self.union()
            return UnionCtor(t.span.cover(rhs.span), t, rhs)
        return t

    def inter(self) -> Term:
        t = self.arrow()
        if self.peek().kind == "@&":
            self.next()
            rhs = self.inter()
            return IntersectionCtor(t.span.cover(rhs.span), t, rhs)
        return t

    def arrow(self) -> Term:
        t = self.logical_or()
        if self.peek().kind == "->":
            self.next()
            rhs = self.arrow()
            return ArrowCtor(t.span.cover(rhs.span), t, rhs)
        return t

    def logical_or(self) -> Term:
        t = self.logical_and()
        while self.peek().kind == "||":
            self.next()
            rhs = self.logical_and()
            t = BinOp(t.span.cover(rhs.span), "||", t, rhs)
        return t

    def logical_and(self) -> Term:
        t = self.comparison()
        while self.peek().kind == "&&":
            self.next()
            rhs = self.comparison()
            t = BinOp(t.span.cover(rhs.span), "&&", t, rhs)
        return t

    def comparison(self) -> Term:
        t = self.concat()
        while self.peek().kind in _CMP_OPS:
            op = self.next().kind
            rhs = self.concat()
            t = BinOp(t.span.cover(rhs.span), op, t, rhs)
        return t

    def concat(self) -> Term:
        t = self.additive()
        if self.peek().kind == "++":
            self.next()
            rhs = self.concat()
            return BinOp(t.span.cover(rhs.span), "++", t, rhs)
        return t

    def additive(self) -> Term:
        t = self.multiplicative()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.multiplicative()
            t = BinOp(t.span.cover(rhs.span), op, t, rhs)
        return t

    def multiplicative(self) -> Term:
        t = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            rhs = self.unary()
            t = BinOp(t.span.cover(rhs.span), op, t, rhs)
        return t

    def unary(self) -> Term:
        if self.peek().kind == "-":
            start = self.next()
            operand = self.unary()
            span = start.span.cover(operand.span)
            if isinstance(operand, NumLit):
                return NumLit(span, -operand.value)
            return BinOp(span, "-", NumLit(start.span, 0.0), operand)
        return self.application()

    def application(self) -> Term:
        t = self.atom()
        while self.peek().kind in _ATOM_START:
            arg = self.atom()
            span = t.span.cover(arg.span)
            if _is_from_pred_head(t):
                t = FromPred(span, arg)
            else:
                t = App(span, t, arg)
        return t

    # -- atoms ---------------------------------------------------------------

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return self._postfix(NumLit(tok.span, float(tok.value)))  # type: ignore[arg-type]
        if tok.kind == "str":
            self.next()
            return self._postfix(StrLit(tok.span, str(tok.value)))
        if tok.kind in ("true", "false"):
            self.next()
            return self._postfix(BoolLit(tok.span, tok.kind == "true"))
        if tok.kind == "null":
            self.next()
            return self._postfix(NullLit(tok.span))
        if tok.kind == "ident":
            self.next()
            if tok.text in _BUILTIN:
                return self._postfix(BuiltinContract(tok.span, tok.text))
            if tok.text == "List":
                element = self.atom()
                return ArrayOfCtor(tok.span.cover(element.span), element)
            if tok.text == "Case":
                open_tok = self.expect("[")
                branches: list[Term] = []
                while self.peek().kind != "]":
                    branches.append(self.expr())
                    if self.peek().kind == ",":
                        self.next()
                    elif self.peek().kind != "]":
                        raise ParseError(self.peek().span, "expected ',' or ']' in Case",
                                         frozenset({",", "]"}))
                close = self.expect("]")
                if not branches:
                    raise ParseError(open_tok.span.cover(close.span),
                                     "Case needs at least one arrow contract")
                return CaseCtor(tok.span.cover(close.span), tuple(branches))
            return self._postfix(Var(tok.span, tok.text))
        if tok.kind == "(":
            self.next()
            inner = self.expr()
            close = self.expect(")")
            reframed = _respan(inner, tok.span.cover(close.span))
            return self._postfix(reframed)
        if tok.kind == "[":
            return self._postfix(self.array(tok))
        if tok.kind == "{":
            return self._postfix(self.record(tok))
        raise ParseError(tok.span, f"unexpected {tok.text or tok.kind!r}", _ATOM_START)

    def array(self, open_tok: Token | None = None) -> Term:
        start = self.expect("[") if open_tok is None else self.next()
        elems: list[Term] = []
        while self.peek().kind != "]":
            elems.append(self.expr())
            if self.peek().kind == ",":
                self.next()
            elif self.peek().kind != "]":
                raise ParseError(self.peek().span, "expected ',' or ']'", frozenset({",", "]"}))
        close = self.expect("]")
        return ArrayLit(start.span.cover(close.span), tuple(elems))

    def record(self, open_tok: Token | None = None) -> Term:
        start = self.expect("{") if open_tok is None else self.next()
        fields: list[tuple[str, Term]] = []
        mode: str | None = None  # "=" value record, "|" record contract
        while self.peek().kind != "}":
            name_tok = self.expect("ident")
            sep = self.peek()
            if sep.kind not in ("=", "|"):
                raise ParseError(sep.span, "expected '=' or '|' after field name",
                                 frozenset({"=", "|"}))
            if mode is None:
                mode = sep.kind
            elif mode != sep.kind:
                raise ParseError(sep.span, "cannot mix '=' and '|' fields in one record")
            self.next()
            value = self.expr() if sep.kind == "=" else self.union()
            if any(name == name_tok.text for name, _ in fields):
                raise ParseError(name_tok.span, f"duplicate field {name_tok.text!r}")
            fields.append((name_tok.text, value))
            if self.peek().kind == ",":
                self.next()
            elif self.peek().kind != "}":
                raise ParseError(self.peek().span, "expected ',' or '}'", frozenset({",", "}"}))
        close = self.expect("}")
        span = start.span.cover(close.span)
        if mode == "|":
            return RecordOfCtor(span, tuple(fields))
        return RecordLit(span, tuple(fields))

    def _postfix(self, t: Term) -> Term:
        while self.peek().kind == ".":
            self.next()
            name = self.expect("ident")
            t = FieldAccess(t.span.cover(name.span), t, name.text)
        return t

    def _check_binder(self, tok: Token) -> None:
        if tok.text in RESERVED:
            raise ParseError(tok.span, f"{tok.text!r} is a reserved contract name")


def _is_from_pred_head(t: Term) -> bool:
    return (isinstance(t, FieldAccess) and t.name == "fromPred"
            and isinstance(t.record, Var) and t.record.name == "contracts")


def _respan(t: Term, span: Span) -> Term:
    """Widen a parenthesized term's span to include the parentheses."""
    return type(t)(**{**{f: getattr(t, f) for f in t.__dataclass_fields__}, "span": span})


def parse_program(source: str, file: str = "<input>") -> Term:
    """Parse a full program; raises LexError or ParseError with spans."""
    return _Parser(tokenize(source, file)).program()


def parse_expr(source: str, file: str = "<input>") -> Term:
    return parse_program(source, file)
