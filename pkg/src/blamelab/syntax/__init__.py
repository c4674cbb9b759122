from .ast import (
    Annot, App, ArrayLit, ArrayOfCtor, ArrowCtor, BinOp, BoolLit,
    BuiltinContract, CaseCtor, ContractCtor, FieldAccess, FromPred, Fun, If,
    IntersectionCtor, Let, NullLit, NumLit, RecordLit, RecordOfCtor, Span,
    StrLit, Term, UnionCtor, Var, children, free_vars, size,
)
from .lexer import LexError, Token, tokenize
from .parser import ParseError, RESERVED, parse_expr, parse_program
from .pretty import format_number, pretty

__all__ = [
    "Annot", "App", "ArrayLit", "ArrayOfCtor", "ArrowCtor", "BinOp",
    "BoolLit", "BuiltinContract", "CaseCtor", "ContractCtor", "FieldAccess",
    "FromPred", "Fun", "If", "IntersectionCtor", "Let", "LexError", "NullLit",
    "NumLit", "ParseError", "RecordLit", "RecordOfCtor", "RESERVED", "Span",
    "StrLit", "Term", "Token", "UnionCtor", "Var", "children", "free_vars",
    "format_number", "parse_expr", "parse_program", "pretty", "size",
    "tokenize",
]
