"""Independent oracles the tests freeze expected values against.

The type oracle runs the declarative typing rules with environment
semantics: types evaluate to closures, foralls open with fresh atoms,
and equality is comparison of reified normal spines. No shifting and
no syntactic substitution anywhere, so agreement with the library's
shift/substitute typechecker is evidence rather than tautology.
"""

from __future__ import annotations

import itertools

from param_workbench import cubemodel as cb
from param_workbench import systemf as sf
from param_workbench.finmodel import all_functions

# Semantic types are tuples:
#   ("atom", level) | ("unit",) | ("prod", l, r) | ("arrow", d, c)
#   | ("forall", body_syntax, env)
# env maps a de Bruijn index to a semantic value; closure bodies stay
# syntactic until applied.


class OracleTypeError(Exception):
    pass


def ty_eval(ty, env):
    if isinstance(ty, sf.TVar):
        if ty.index >= len(env):
            raise OracleTypeError(f"type index {ty.index} escapes")
        return env[ty.index]
    if isinstance(ty, sf.UnitT):
        return ("unit",)
    if isinstance(ty, sf.ProdT):
        return ("prod", ty_eval(ty.left, env), ty_eval(ty.right, env))
    if isinstance(ty, sf.ArrowT):
        return ("arrow", ty_eval(ty.dom, env), ty_eval(ty.cod, env))
    if isinstance(ty, sf.ForallT):
        return ("forall", ty.body, env)
    raise TypeError(f"not a type: {ty!r}")


def ty_reify(v, depth):
    tag = v[0]
    if tag == "atom":
        return sf.TVar(depth - 1 - v[1])
    if tag == "unit":
        return sf.UnitT()
    if tag == "prod":
        return sf.ProdT(ty_reify(v[1], depth), ty_reify(v[2], depth))
    if tag == "arrow":
        return sf.ArrowT(ty_reify(v[1], depth), ty_reify(v[2], depth))
    if tag == "forall":
        opened = ty_eval(v[1], (("atom", depth),) + v[2])
        return sf.ForallT(ty_reify(opened, depth + 1))
    raise TypeError(f"not a semantic type: {v!r}")


def sem_equal(a, b, depth):
    return ty_reify(a, depth) == ty_reify(b, depth)


def _rules(t, tyenv, ctx, depth):
    if isinstance(t, sf.Var):
        if t.index >= len(ctx):
            raise OracleTypeError(f"unbound variable {t.index}")
        return ctx[t.index]
    if isinstance(t, sf.UnitV):
        return ("unit",)
    if isinstance(t, sf.Lam):
        dom = ty_eval(t.annot, tyenv)
        cod = _rules(t.body, tyenv, (dom,) + ctx, depth)
        return ("arrow", dom, cod)
    if isinstance(t, sf.App):
        fn = _rules(t.fn, tyenv, ctx, depth)
        arg = _rules(t.arg, tyenv, ctx, depth)
        if fn[0] != "arrow":
            raise OracleTypeError("application head is not an arrow")
        if not sem_equal(fn[1], arg, depth):
            raise OracleTypeError("argument type mismatch")
        return fn[2]
    if isinstance(t, sf.Pair):
        return ("prod", _rules(t.left, tyenv, ctx, depth),
                _rules(t.right, tyenv, ctx, depth))
    if isinstance(t, sf.Fst):
        body = _rules(t.body, tyenv, ctx, depth)
        if body[0] != "prod":
            raise OracleTypeError("fst of a non-product")
        return body[1]
    if isinstance(t, sf.Snd):
        body = _rules(t.body, tyenv, ctx, depth)
        if body[0] != "prod":
            raise OracleTypeError("snd of a non-product")
        return body[2]
    if isinstance(t, sf.TyLam):
        opened = _rules(t.body, (("atom", depth),) + tyenv, ctx, depth + 1)
        # re-close over the fresh atom so instantiation stays lazy
        return ("forall", ty_reify(opened, depth + 1), tyenv)
    if isinstance(t, sf.TyApp):
        fn = _rules(t.fn, tyenv, ctx, depth)
        if fn[0] != "forall":
            raise OracleTypeError("type application head is not a forall")
        return ty_eval(fn[1], (ty_eval(t.arg, tyenv),) + fn[2])
    raise TypeError(f"not a term: {t!r}")


def oracle_typecheck(t, tyctx_depth=0, termctx=()):
    """Declarative-rules type of t, reified to de Bruijn syntax."""
    tyenv = tuple(("atom", tyctx_depth - 1 - i) for i in range(tyctx_depth))
    ctx = tuple(ty_eval(ty, tyenv) for ty in termctx)
    return ty_reify(_rules(t, tyenv, ctx, tyctx_depth), tyctx_depth)


def all_wit_mors(src: cb.WitRel, tgt: cb.WitRel) -> list:
    """Every witnessed-relation morphism src -> tgt, by brute force.

    Enumerates all leg pairs and all witness assignments, keeping
    whatever the constructor accepts. Used to assert uniqueness claims
    by search rather than by the library's own solving code.
    """
    out = []
    triples = list(src.triples())
    for f in all_functions(src.dom, tgt.dom):
        for g in all_functions(src.cod, tgt.cod):
            choices = [tgt.wits(f(a), g(b)) for a, b, _ in triples]
            if not all(choices):
                continue
            for chosen in itertools.product(*choices):
                send = dict(zip(((a, b, w) for a, b, w in triples), chosen))
                out.append(cb.wit_mor(src, tgt, f, g, send))
    return out


def all_two_mors(src: cb.TwoRel, tgt: cb.TwoRel) -> list:
    """Every square morphism src -> tgt: edge tuples pruned by corner
    sharing, then filtered by the constructor's cell preservation."""
    out = []
    for t in all_wit_mors(src.top, tgt.top):
        for l in all_wit_mors(src.left, tgt.left):
            if l.f != t.f:
                continue
            for b in all_wit_mors(src.bottom, tgt.bottom):
                if b.f != l.g:
                    continue
                for r in all_wit_mors(src.right, tgt.right):
                    if r.f != t.g or r.g != b.g:
                        continue
                    try:
                        out.append(cb.TwoRelMor(src, tgt, t, l, b, r))
                    except ValueError:
                        continue
    return out


def erases_to(t, u) -> bool:
    """The erasure relation by structural induction, independent of
    the erase function's recursion shape."""
    if isinstance(t, sf.TyLam):
        return erases_to(t.body, u)
    if isinstance(t, sf.TyApp):
        return erases_to(t.fn, u)
    if isinstance(t, sf.Var):
        return isinstance(u, sf.UVar) and u.index == t.index
    if isinstance(t, sf.UnitV):
        return isinstance(u, sf.UUnit)
    if isinstance(t, sf.Lam):
        return isinstance(u, sf.ULam) and erases_to(t.body, u.body)
    if isinstance(t, sf.App):
        return (isinstance(u, sf.UApp) and erases_to(t.fn, u.fn)
                and erases_to(t.arg, u.arg))
    if isinstance(t, sf.Pair):
        return (isinstance(u, sf.UPair) and erases_to(t.left, u.left)
                and erases_to(t.right, u.right))
    if isinstance(t, sf.Fst):
        return isinstance(u, sf.UFst) and erases_to(t.body, u.body)
    if isinstance(t, sf.Snd):
        return isinstance(u, sf.USnd) and erases_to(t.body, u.body)
    raise TypeError(f"not a term: {t!r}")
