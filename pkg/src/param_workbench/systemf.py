"""System F with de Bruijn binders: parsing, typechecking, normalization, erasure.

Terms are Church-style (lambdas carry full domain annotations), so
typechecking is syntax-directed. Both binder kinds use de Bruijn
indices; the pretty-printer regenerates fresh names.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

DEFAULT_FUEL = 10**6
FUEL_ENV_VAR = "PARAM_WORKBENCH_FUEL"


# ---------------------------------------------------------------------------
# Syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TVar:
    """Type variable (de Bruijn index, 0 = innermost binder)."""
    index: int


@dataclass(frozen=True)
class UnitT:
    """The unit type."""


@dataclass(frozen=True)
class ProdT:
    """Binary product type."""
    left: Type
    right: Type


@dataclass(frozen=True)
class ArrowT:
    """Function type."""
    dom: Type
    cod: Type


@dataclass(frozen=True)
class ForallT:
    """Universal type; body lives under one extra type binder."""
    body: Type


Type = Union[TVar, UnitT, ProdT, ArrowT, ForallT]


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lam:
    annot: Type
    body: Term


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair:
    left: Term
    right: Term


@dataclass(frozen=True)
class Fst:
    body: Term


@dataclass(frozen=True)
class Snd:
    body: Term


@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class TyLam:
    body: Term


@dataclass(frozen=True)
class TyApp:
    fn: Term
    arg: Type


Term = Union[Var, Lam, App, Pair, Fst, Snd, UnitV, TyLam, TyApp]


@dataclass(frozen=True)
class UVar:
    index: int


@dataclass(frozen=True)
class ULam:
    body: UntypedTerm


@dataclass(frozen=True)
class UApp:
    fn: UntypedTerm
    arg: UntypedTerm


@dataclass(frozen=True)
class UPair:
    left: UntypedTerm
    right: UntypedTerm


@dataclass(frozen=True)
class UFst:
    body: UntypedTerm


@dataclass(frozen=True)
class USnd:
    body: UntypedTerm


@dataclass(frozen=True)
class UUnit:
    pass


UntypedTerm = Union[UVar, ULam, UApp, UPair, UFst, USnd, UUnit]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class SyntaxFError(Exception):
    """Parse failure with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class TypecheckError(Exception):
    """Typechecking failure; carries expected/actual where applicable."""

    def __init__(self, message: str, expected: Optional[Type] = None,
                 actual: Optional[Type] = None):
        if expected is not None and actual is not None:
            message = (f"{message}: expected {pretty_type(expected)}, "
                       f"got {pretty_type(actual)}")
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class FuelExhausted(Exception):
    """Normalization ran out of fuel. System F is strongly normalizing,
    so hitting this on well-typed input signals an implementation bug."""


# ---------------------------------------------------------------------------
# Scope checks and substitution
# ---------------------------------------------------------------------------

def type_well_scoped(ty: Type, depth: int) -> bool:
    """Every TVar index is strictly below the binder depth."""
    match ty:
        case TVar(i):
            return 0 <= i < depth
        case UnitT():
            return True
        case ProdT(l, r) | ArrowT(l, r):
            return type_well_scoped(l, depth) and type_well_scoped(r, depth)
        case ForallT(b):
            return type_well_scoped(b, depth + 1)
    raise TypeError(f"not a type: {ty!r}")


def shift_type(ty: Type, amount: int, cutoff: int = 0) -> Type:
    match ty:
        case TVar(i):
            return TVar(i + amount) if i >= cutoff else ty
        case UnitT():
            return ty
        case ProdT(l, r):
            return ProdT(shift_type(l, amount, cutoff), shift_type(r, amount, cutoff))
        case ArrowT(d, c):
            return ArrowT(shift_type(d, amount, cutoff), shift_type(c, amount, cutoff))
        case ForallT(b):
            return ForallT(shift_type(b, amount, cutoff + 1))
    raise TypeError(f"not a type: {ty!r}")


def subst_type(ty: Type, replacement: Type, target: int = 0) -> Type:
    """Substitute `replacement` for TVar(target) in ty, capture-avoiding."""
    match ty:
        case TVar(i):
            if i == target:
                return shift_type(replacement, target)
            return TVar(i - 1) if i > target else ty
        case UnitT():
            return ty
        case ProdT(l, r):
            return ProdT(subst_type(l, replacement, target),
                         subst_type(r, replacement, target))
        case ArrowT(d, c):
            return ArrowT(subst_type(d, replacement, target),
                          subst_type(c, replacement, target))
        case ForallT(b):
            return ForallT(subst_type(b, replacement, target + 1))
    raise TypeError(f"not a type: {ty!r}")


def shift_term(t: Term, amount: int, cutoff: int = 0) -> Term:
    """Shift term variables only."""
    match t:
        case Var(i):
            return Var(i + amount) if i >= cutoff else t
        case Lam(a, b):
            return Lam(a, shift_term(b, amount, cutoff + 1))
        case App(f, x):
            return App(shift_term(f, amount, cutoff), shift_term(x, amount, cutoff))
        case Pair(l, r):
            return Pair(shift_term(l, amount, cutoff), shift_term(r, amount, cutoff))
        case Fst(b):
            return Fst(shift_term(b, amount, cutoff))
        case Snd(b):
            return Snd(shift_term(b, amount, cutoff))
        case UnitV():
            return t
        case TyLam(b):
            return TyLam(shift_term(b, amount, cutoff))
        case TyApp(f, ty):
            return TyApp(shift_term(f, amount, cutoff), ty)
    raise TypeError(f"not a term: {t!r}")


def shift_term_types(t: Term, amount: int, cutoff: int = 0) -> Term:
    """Shift type variables occurring in a term's annotations."""
    match t:
        case Var(_) | UnitV():
            return t
        case Lam(a, b):
            return Lam(shift_type(a, amount, cutoff), shift_term_types(b, amount, cutoff))
        case App(f, x):
            return App(shift_term_types(f, amount, cutoff), shift_term_types(x, amount, cutoff))
        case Pair(l, r):
            return Pair(shift_term_types(l, amount, cutoff), shift_term_types(r, amount, cutoff))
        case Fst(b):
            return Fst(shift_term_types(b, amount, cutoff))
        case Snd(b):
            return Snd(shift_term_types(b, amount, cutoff))
        case TyLam(b):
            return TyLam(shift_term_types(b, amount, cutoff + 1))
        case TyApp(f, ty):
            return TyApp(shift_term_types(f, amount, cutoff), shift_type(ty, amount, cutoff))
    raise TypeError(f"not a term: {t!r}")


def subst_term(t: Term, replacement: Term, target: int = 0) -> Term:
    match t:
        case Var(i):
            if i == target:
                return shift_term(replacement, target)
            return Var(i - 1) if i > target else t
        case Lam(a, b):
            return Lam(a, subst_term(b, replacement, target + 1))
        case App(f, x):
            return App(subst_term(f, replacement, target), subst_term(x, replacement, target))
        case Pair(l, r):
            return Pair(subst_term(l, replacement, target), subst_term(r, replacement, target))
        case Fst(b):
            return Fst(subst_term(b, replacement, target))
        case Snd(b):
            return Snd(subst_term(b, replacement, target))
        case UnitV():
            return t
        case TyLam(b):
            return TyLam(subst_term(b, shift_term_types(replacement, 1), target))
        case TyApp(f, ty):
            return TyApp(subst_term(f, replacement, target), ty)
    raise TypeError(f"not a term: {t!r}")


def subst_type_in_term(t: Term, replacement: Type, target: int = 0) -> Term:
    match t:
        case Var(_) | UnitV():
            return t
        case Lam(a, b):
            return Lam(subst_type(a, replacement, target),
                       subst_type_in_term(b, replacement, target))
        case App(f, x):
            return App(subst_type_in_term(f, replacement, target),
                       subst_type_in_term(x, replacement, target))
        case Pair(l, r):
            return Pair(subst_type_in_term(l, replacement, target),
                        subst_type_in_term(r, replacement, target))
        case Fst(b):
            return Fst(subst_type_in_term(b, replacement, target))
        case Snd(b):
            return Snd(subst_type_in_term(b, replacement, target))
        case TyLam(b):
            return TyLam(subst_type_in_term(b, replacement, target + 1))
        case TyApp(f, ty):
            return TyApp(subst_type_in_term(f, replacement, target),
                         subst_type(ty, replacement, target))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Typechecking
# ---------------------------------------------------------------------------

def typecheck(tyctx_depth: int, termctx: tuple[Type, ...], t: Term) -> Type:
    """Return the unique type of t under the given contexts.

    termctx is indexed by de Bruijn level: termctx[0] is Var(0), the
    innermost binding. All annotations must be well-scoped under
    tyctx_depth; TyApp substitutes capture-avoidingly into the body
    of the forall.
    """
    match t:
        case Var(i):
            if not 0 <= i < len(termctx):
                raise TypecheckError(f"unbound term variable {i}")
            return termctx[i]
        case Lam(annot, body):
            if not type_well_scoped(annot, tyctx_depth):
                raise TypecheckError("annotation escapes type context")
            cod = typecheck(tyctx_depth, (annot,) + termctx, body)
            return ArrowT(annot, cod)
        case App(fn, arg):
            fn_ty = typecheck(tyctx_depth, termctx, fn)
            if not isinstance(fn_ty, ArrowT):
                raise TypecheckError("applying a non-function", actual=fn_ty,
                                     expected=ArrowT(UnitT(), UnitT()))
            arg_ty = typecheck(tyctx_depth, termctx, arg)
            if arg_ty != fn_ty.dom:
                raise TypecheckError("argument type mismatch",
                                     expected=fn_ty.dom, actual=arg_ty)
            return fn_ty.cod
        case Pair(l, r):
            return ProdT(typecheck(tyctx_depth, termctx, l),
                         typecheck(tyctx_depth, termctx, r))
        case Fst(b):
            ty = typecheck(tyctx_depth, termctx, b)
            if not isinstance(ty, ProdT):
                raise TypecheckError("fst of a non-pair", actual=ty,
                                     expected=ProdT(UnitT(), UnitT()))
            return ty.left
        case Snd(b):
            ty = typecheck(tyctx_depth, termctx, b)
            if not isinstance(ty, ProdT):
                raise TypecheckError("snd of a non-pair", actual=ty,
                                     expected=ProdT(UnitT(), UnitT()))
            return ty.right
        case UnitV():
            return UnitT()
        case TyLam(body):
            shifted = tuple(shift_type(ty, 1) for ty in termctx)
            return ForallT(typecheck(tyctx_depth + 1, shifted, body))
        case TyApp(fn, arg):
            fn_ty = typecheck(tyctx_depth, termctx, fn)
            if not isinstance(fn_ty, ForallT):
                raise TypecheckError("type-applying a non-forall", actual=fn_ty,
                                     expected=ForallT(TVar(0)))
            if not type_well_scoped(arg, tyctx_depth):
                raise TypecheckError("type argument escapes type context")
            return subst_type(fn_ty.body, arg)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def _fuel() -> int:
    raw = os.environ.get(FUEL_ENV_VAR)
    return int(raw) if raw else DEFAULT_FUEL


def step(t: Term) -> Optional[Term]:
    """One normal-order (leftmost-outermost) reduction step, or None."""
    match t:
        case App(Lam(_, body), arg):
            return subst_term(body, arg)
        case TyApp(TyLam(body), ty):
            return subst_type_in_term(body, ty)
        case Fst(Pair(l, _)):
            return l
        case Snd(Pair(_, r)):
            return r
        case App(f, x):
            s = step(f)
            if s is not None:
                return App(s, x)
            s = step(x)
            return None if s is None else App(f, s)
        case TyApp(f, ty):
            s = step(f)
            return None if s is None else TyApp(s, ty)
        case Lam(a, b):
            s = step(b)
            return None if s is None else Lam(a, s)
        case TyLam(b):
            s = step(b)
            return None if s is None else TyLam(s)
        case Pair(l, r):
            s = step(l)
            if s is not None:
                return Pair(s, r)
            s = step(r)
            return None if s is None else Pair(l, s)
        case Fst(b):
            s = step(b)
            return None if s is None else Fst(s)
        case Snd(b):
            s = step(b)
            return None if s is None else Snd(s)
        case Var(_) | UnitV():
            return None
    raise TypeError(f"not a term: {t!r}")


def normalize(t: Term, fuel: Optional[int] = None) -> Term:
    """Full beta-normal form. Reduces under binders; idempotent."""
    remaining = _fuel() if fuel is None else fuel
    while True:
        s = step(t)
        if s is None:
            return t
        remaining -= 1
        if remaining < 0:
            raise FuelExhausted("no normal form within fuel bound")
        t = s


def ustep(t: UntypedTerm) -> Optional[UntypedTerm]:
    match t:
        case UApp(ULam(body), arg):
            return usubst(body, arg)
        case UFst(UPair(l, _)):
            return l
        case USnd(UPair(_, r)):
            return r
        case UApp(f, x):
            s = ustep(f)
            if s is not None:
                return UApp(s, x)
            s = ustep(x)
            return None if s is None else UApp(f, s)
        case ULam(b):
            s = ustep(b)
            return None if s is None else ULam(s)
        case UPair(l, r):
            s = ustep(l)
            if s is not None:
                return UPair(s, r)
            s = ustep(r)
            return None if s is None else UPair(l, s)
        case UFst(b):
            s = ustep(b)
            return None if s is None else UFst(s)
        case USnd(b):
            s = ustep(b)
            return None if s is None else USnd(s)
        case UVar(_) | UUnit():
            return None
    raise TypeError(f"not an untyped term: {t!r}")


def ushift(t: UntypedTerm, amount: int, cutoff: int = 0) -> UntypedTerm:
    match t:
        case UVar(i):
            return UVar(i + amount) if i >= cutoff else t
        case ULam(b):
            return ULam(ushift(b, amount, cutoff + 1))
        case UApp(f, x):
            return UApp(ushift(f, amount, cutoff), ushift(x, amount, cutoff))
        case UPair(l, r):
            return UPair(ushift(l, amount, cutoff), ushift(r, amount, cutoff))
        case UFst(b):
            return UFst(ushift(b, amount, cutoff))
        case USnd(b):
            return USnd(ushift(b, amount, cutoff))
        case UUnit():
            return t
    raise TypeError(f"not an untyped term: {t!r}")


def usubst(t: UntypedTerm, replacement: UntypedTerm, target: int = 0) -> UntypedTerm:
    match t:
        case UVar(i):
            if i == target:
                return ushift(replacement, target)
            return UVar(i - 1) if i > target else t
        case ULam(b):
            return ULam(usubst(b, replacement, target + 1))
        case UApp(f, x):
            return UApp(usubst(f, replacement, target), usubst(x, replacement, target))
        case UPair(l, r):
            return UPair(usubst(l, replacement, target), usubst(r, replacement, target))
        case UFst(b):
            return UFst(usubst(b, replacement, target))
        case USnd(b):
            return USnd(usubst(b, replacement, target))
        case UUnit():
            return t
    raise TypeError(f"not an untyped term: {t!r}")


def unormalize(t: UntypedTerm, fuel: Optional[int] = None) -> UntypedTerm:
    remaining = _fuel() if fuel is None else fuel
    while True:
        s = ustep(t)
        if s is None:
            return t
        remaining -= 1
        if remaining < 0:
            raise FuelExhausted("no normal form within fuel bound")
        t = s


def erase(t: Term) -> UntypedTerm:
    """Forget types: TyLam/TyApp vanish, the term skeleton remains."""
    match t:
        case Var(i):
            return UVar(i)
        case Lam(_, b):
            return ULam(erase(b))
        case App(f, x):
            return UApp(erase(f), erase(x))
        case Pair(l, r):
            return UPair(erase(l), erase(r))
        case Fst(b):
            return UFst(erase(b))
        case Snd(b):
            return USnd(erase(b))
        case UnitV():
            return UUnit()
        case TyLam(b):
            return erase(b)
        case TyApp(f, _):
            return erase(f)
    raise TypeError(f"not a term: {t!r}")


def term_size(t: Union[Term, UntypedTerm]) -> int:
    match t:
        case Var(_) | UVar(_) | UnitV() | UUnit():
            return 1
        case Lam(_, b) | TyLam(b) | Fst(b) | Snd(b) | ULam(b) | UFst(b) | USnd(b):
            return 1 + term_size(b)
        case App(f, x) | Pair(f, x) | UApp(f, x) | UPair(f, x):
            return 1 + term_size(f) + term_size(x)
        case TyApp(f, _):
            return 1 + term_size(f)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Pretty-printing
# ---------------------------------------------------------------------------

def _ty_name(i: int) -> str:
    # a, b, ..., z, a1, b1, ...
    letter = chr(ord("a") + i % 26)
    return letter if i < 26 else f"{letter}{i // 26}"


def _tm_name(i: int) -> str:
    letter = chr(ord("x") + i % 3)
    return letter if i < 3 else f"{letter}{i // 3}"


def pretty_type(ty: Type, depth: int = 0) -> str:
    def go(ty: Type, d: int, prec: int) -> str:
        # prec: 0 = forall/arrow position, 1 = product, 2 = atom
        match ty:
            case TVar(i):
                return _ty_name(d - 1 - i) if i < d else f"?{i}"
            case UnitT():
                return "unit"
            case ArrowT(dom, c):
                s = f"{go(dom, d, 1)} -> {go(c, d, 0)}"
                return f"({s})" if prec > 0 else s
            case ProdT(l, r):
                s = f"{go(l, d, 2)} * {go(r, d, 1)}"
                return f"({s})" if prec > 1 else s
            case ForallT(b):
                s = f"forall {_ty_name(d)}. {go(b, d + 1, 0)}"
                return f"({s})" if prec > 0 else s
        raise TypeError(f"not a type: {ty!r}")

    return go(ty, depth, 0)


def pretty_term(t: Term, ty_depth: int = 0, tm_depth: int = 0) -> str:
    def tyname(i: int, d: int) -> str:
        return _ty_name(d - 1 - i) if i < d else f"?{i}"

    def go(t: Term, tyd: int, tmd: int, prec: int) -> str:
        # prec: 0 = binder position, 1 = application, 2 = atom
        match t:
            case Var(i):
                return _tm_name(tmd - 1 - i) if i < tmd else f"?v{i}"
            case UnitV():
                return "()"
            case Lam(a, b):
                name = _tm_name(tmd)
                s = f"\\{name}:{pretty_type(a, tyd)}. {go(b, tyd, tmd + 1, 0)}"
                return f"({s})" if prec > 0 else s
            case TyLam(b):
                name = _ty_name(tyd)
                s = f"/\\{name}. {go(b, tyd + 1, tmd, 0)}"
                return f"({s})" if prec > 0 else s
            case App(f, x):
                s = f"{go(f, tyd, tmd, 1)} {go(x, tyd, tmd, 2)}"
                return f"({s})" if prec > 1 else s
            case TyApp(f, ty):
                s = f"{go(f, tyd, tmd, 1)} [{pretty_type(ty, tyd)}]"
                return f"({s})" if prec > 1 else s
            case Pair(l, r):
                return f"({go(l, tyd, tmd, 0)}, {go(r, tyd, tmd, 0)})"
            case Fst(b):
                s = f"fst {go(b, tyd, tmd, 2)}"
                return f"({s})" if prec > 1 else s
            case Snd(b):
                s = f"snd {go(b, tyd, tmd, 2)}"
                return f"({s})" if prec > 1 else s
        raise TypeError(f"not a term: {t!r}")

    return go(t, ty_depth, tm_depth, 0)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<tylam>/\\)
  | (?P<lam>\\)
  | (?P<arrow>->)
  | (?P<unitval>\(\))
  | (?P<punct>[().,:*\[\]=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

_KEYWORDS = {"forall", "unit", "fst", "snd"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise SyntaxFError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in _KEYWORDS:
                kind = text
            toks.append(_Tok(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    """Recursive descent over the token list.

    Binder names are resolved to de Bruijn indices against two scope
    stacks (innermost last). `defs` supplies closed terms for free
    identifiers, so corpus files can reference earlier definitions.
    """

    def __init__(self, toks: list[_Tok], defs: Optional[dict[str, Term]] = None):
        self.toks = toks
        self.pos = 0
        self.tyvars: list[str] = []
        self.tmvars: list[str] = []
        self.defs = defs or {}

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            raise SyntaxFError(f"expected {kind}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def fail(self, msg: str) -> SyntaxFError:
        tok = self.peek()
        return SyntaxFError(msg, tok.line, tok.col)

    # types: arrow (right assoc) > product (right assoc) > atom

    def parse_type(self) -> Type:
        left = self.parse_prod_type()
        if self.peek().kind == "arrow":
            self.next()
            return ArrowT(left, self.parse_type())
        return left

    def parse_prod_type(self) -> Type:
        left = self.parse_atom_type()
        if self.peek().kind == "punct" and self.peek().text == "*":
            self.next()
            return ProdT(left, self.parse_prod_type())
        return left

    def parse_atom_type(self) -> Type:
        tok = self.peek()
        if tok.kind == "unit":
            self.next()
            return UnitT()
        if tok.kind == "forall":
            self.next()
            name = self.expect("ident").text
            self.expect_punct(".")
            self.tyvars.append(name)
            body = self.parse_type()
            self.tyvars.pop()
            return ForallT(body)
        if tok.kind == "ident":
            self.next()
            try:
                return TVar(self.tyvars[::-1].index(tok.text))
            except ValueError:
                raise SyntaxFError(f"unbound type variable {tok.text!r}",
                                   tok.line, tok.col) from None
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            ty = self.parse_type()
            self.expect_punct(")")
            return ty
        raise self.fail(f"expected a type, got {tok.text!r}")

    def expect_punct(self, text: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            raise SyntaxFError(f"expected {text!r}, got {tok.text!r}", tok.line, tok.col)

    # terms: binders extend right; application and [T] are left-assoc;
    # fst/snd bind a prefix operand

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "lam":
            self.next()
            name = self.expect("ident").text
            self.expect_punct(":")
            annot = self.parse_type()
            self.expect_punct(".")
            self.tmvars.append(name)
            body = self.parse_term()
            self.tmvars.pop()
            return Lam(annot, body)
        if tok.kind == "tylam":
            self.next()
            name = self.expect("ident").text
            self.expect_punct(".")
            self.tyvars.append(name)
            body = self.parse_term()
            self.tyvars.pop()
            return TyLam(body)
        return self.parse_app_term()

    def parse_app_term(self) -> Term:
        t = self.parse_prefix_term()
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "[":
                self.next()
                ty = self.parse_type()
                self.expect_punct("]")
                t = TyApp(t, ty)
            elif self._starts_prefix_term(tok):
                t = App(t, self.parse_prefix_term())
            else:
                return t

    def _starts_prefix_term(self, tok: _Tok) -> bool:
        if tok.kind in ("ident", "fst", "snd", "unitval", "lam", "tylam"):
            return True
        return tok.kind == "punct" and tok.text == "("

    def parse_prefix_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "fst":
            self.next()
            return Fst(self.parse_prefix_term())
        if tok.kind == "snd":
            self.next()
            return Snd(self.parse_prefix_term())
        return self.parse_atom_term()

    def parse_atom_term(self) -> Term:
        tok = self.next()
        if tok.kind == "ident":
            try:
                rindex = self.tmvars[::-1].index(tok.text)
                return Var(rindex)
            except ValueError:
                pass
            if tok.text in self.defs:
                return self.defs[tok.text]
            raise SyntaxFError(f"unbound identifier {tok.text!r}", tok.line, tok.col)
        if tok.kind == "unitval":
            return UnitV()
        if tok.kind == "lam" or tok.kind == "tylam":
            self.pos -= 1
            return self.parse_term()
        if tok.kind == "punct" and tok.text == "(":
            t = self.parse_term()
            nxt = self.next()
            if nxt.kind == "punct" and nxt.text == ",":
                r = self.parse_term()
                self.expect_punct(")")
                return Pair(t, r)
            if nxt.kind == "punct" and nxt.text == ")":
                return t
            raise SyntaxFError(f"expected ',' or ')', got {nxt.text!r}", nxt.line, nxt.col)
        raise SyntaxFError(f"expected a term, got {tok.text!r}", tok.line, tok.col)


def parse_type_str(src: str) -> Type:
    p = _Parser(_tokenize(src))
    ty = p.parse_type()
    p.expect("eof")
    return ty


def parse_term_str(src: str, defs: Optional[dict[str, Term]] = None) -> Term:
    p = _Parser(_tokenize(src), defs)
    t = p.parse_term()
    p.expect("eof")
    return t


def parse(src: str, kind: str) -> Union[Type, Term]:
    """Parse a single type or term, per `kind` in {"type", "term"}."""
    if kind == "type":
        return parse_type_str(src)
    if kind == "term":
        return parse_term_str(src)
    raise ValueError(f"kind must be 'type' or 'term', not {kind!r}")


@dataclass(frozen=True)
class Definition:
    name: str
    declared: Type
    term: Term


def parse_program(src: str) -> list[Definition]:
    """Parse a .sysf file: one `name : T = t` per line.

    Blank lines and `#` comments are skipped. Later definitions may
    mention earlier ones by name; the closed term is inlined. Each
    definition is typechecked against its declared type.
    """
    defs: dict[str, Term] = {}
    out: list[Definition] = []
    for lineno, raw in enumerate(src.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, eq, body = line.partition("=")
        if not eq:
            raise SyntaxFError("expected 'name : T = t'", lineno, 1)
        name, colon, ty_src = head.partition(":")
        if not colon:
            raise SyntaxFError("expected ':' before the declared type", lineno, 1)
        name = name.strip()
        declared = parse_type_str(ty_src.strip())
        term = parse_term_str(body.strip(), defs)
        actual = typecheck(0, (), term)
        if actual != declared:
            raise TypecheckError(f"definition {name!r}", expected=declared,
                                 actual=actual)
        defs[name] = term
        out.append(Definition(name, declared, term))
    return out


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    match t:
        case Lam(_, b) | TyLam(b) | Fst(b) | Snd(b):
            yield from iter_subterms(b)
        case App(f, x) | Pair(f, x):
            yield from iter_subterms(f)
            yield from iter_subterms(x)
        case TyApp(f, _):
            yield from iter_subterms(f)
        case _:
            pass
