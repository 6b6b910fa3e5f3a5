"""Independent reference implementations used to cross-check the engine.

Everything here is deliberately written against the definitions, not the
engine: a stack-machine evaluator (no recursion sharing with the engine's
recursive evaluator), a countermodel re-checker built on it, and a
formula-level validity oracle for quantifier-free sequents that enumerates
value assignments to ground atom classes directly instead of enumerating
models.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from tolerance_lab.syntax import (
    And, Constant, Exists, Forall, Implies, Not, Or, Pred, Sequent, Sim,
)

ZERO = Fraction(0)
HALF = Fraction(1, 2)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Reference evaluator: ground out quantifiers, then run a value stack.
# ---------------------------------------------------------------------------

def _ground(model, f, env):
    """Expand quantifiers into explicit min/max trees over the domain."""
    if isinstance(f, Pred):
        return ("atom", tuple(_elem(model, t, env) for t in f.args), f.name)
    if isinstance(f, Sim):
        return ("sim", (_elem(model, f.left, env), _elem(model, f.right, env)), f.base)
    if isinstance(f, Not):
        return ("not", _ground(model, f.body, env))
    if isinstance(f, And):
        return ("min", _ground(model, f.left, env), _ground(model, f.right, env))
    if isinstance(f, Or):
        return ("max", _ground(model, f.left, env), _ground(model, f.right, env))
    if isinstance(f, Implies):
        return (
            "max",
            ("not", _ground(model, f.left, env)),
            _ground(model, f.right, env),
        )
    if isinstance(f, Forall):
        parts = [_ground(model, f.body, {**env, f.var: d}) for d in model.domain]
        return ("fold_min", parts)
    if isinstance(f, Exists):
        parts = [_ground(model, f.body, {**env, f.var: d}) for d in model.domain]
        return ("fold_max", parts)
    raise TypeError(f)


def _elem(model, t, env):
    if isinstance(t, Constant):
        return model.consts[t.name]
    return env[t.name]


def ref_eval(model, f) -> Fraction:
    """Post-order stack evaluation of the grounded tree."""
    tree = _ground(model, f, {})
    out: list[Fraction] = []
    stack: list[tuple] = [("visit", tree)]
    while stack:
        op, node = stack.pop()
        kind = node[0]
        if op == "visit":
            if kind == "atom":
                out.append(model.preds[(node[2], node[1])])
            elif kind == "sim":
                d, e = node[1]
                if d == e:
                    out.append(ONE)
                else:
                    key = (node[2], d, e) if d <= e else (node[2], e, d)
                    out.append(model.sims[key])
            elif kind == "not":
                stack.append(("emit", node))
                stack.append(("visit", node[1]))
            elif kind in ("min", "max"):
                stack.append(("emit", node))
                stack.append(("visit", node[2]))
                stack.append(("visit", node[1]))
            else:
                stack.append(("emit", node))
                for part in reversed(node[1]):
                    stack.append(("visit", part))
        else:
            if kind == "not":
                out.append(ONE - out.pop())
            elif kind == "min":
                b, a = out.pop(), out.pop()
                out.append(a if a <= b else b)
            elif kind == "max":
                b, a = out.pop(), out.pop()
                out.append(a if a >= b else b)
            elif kind == "fold_min":
                vals = [out.pop() for _ in node[1]]
                out.append(min(vals))
            else:
                vals = [out.pop() for _ in node[1]]
                out.append(max(vals))
    assert len(out) == 1
    return out[0]


# ---------------------------------------------------------------------------
# Parameter membership, stated from scratch.
# ---------------------------------------------------------------------------

def in_boundary(bs, x: Fraction) -> bool:
    from tolerance_lab.parameter import ExplicitSet
    if isinstance(bs, ExplicitSet):
        return x in bs.values
    above = x > bs.lo or (x == bs.lo and not bs.lo_open)
    below = x < bs.hi or (x == bs.hi and not bs.hi_open)
    return above and below


def is_countermodel_ref(model, s: Sequent, param, tolerant: bool) -> bool:
    """Re-check a claimed countermodel with the reference evaluator."""
    from tolerance_lab.semantics import FiniteValues
    if isinstance(param.values, FiniteValues):
        for v in list(model.preds.values()) + list(model.sims.values()):
            if v not in tuple(param.values):
                return False
    for f in s.left:
        if not in_boundary(param.premise_set, ref_eval(model, f)):
            return False
    for f in s.right:
        if not in_boundary(param.conclusion_set, ref_eval(model, f)):
            return False
    if tolerant:
        for (base, d, e), sv in model.sims.items():
            if in_boundary(param.conclusion_set, sv):
                continue
            vd = model.preds.get((base, (d,)))
            ve = model.preds.get((base, (e,)))
            if vd is None or ve is None:
                continue
            hi_d = in_boundary(param.premise_set, vd)
            hi_e = in_boundary(param.premise_set, ve)
            lo_d = in_boundary(param.conclusion_set, vd)
            lo_e = in_boundary(param.conclusion_set, ve)
            if (hi_d and lo_e) or (hi_e and lo_d):
                return False
    return True


# ---------------------------------------------------------------------------
# Formula-level validity oracle for quantifier-free sequents.
# ---------------------------------------------------------------------------

def _atom_key(f):
    if isinstance(f, Pred):
        return ("p", f.name, tuple(t.name for t in f.args))
    if isinstance(f, Sim):
        a, b = f.left.name, f.right.name
        if a == b:
            return None
        return ("s", f.base, (a, b) if a <= b else (b, a))
    raise TypeError(f)


def _collect_atoms(f, acc):
    if isinstance(f, (Pred, Sim)):
        key = _atom_key(f)
        if key is not None and key not in acc:
            acc.append(key)
    elif isinstance(f, Not):
        _collect_atoms(f.body, acc)
    elif isinstance(f, (And, Or, Implies)):
        _collect_atoms(f.left, acc)
        _collect_atoms(f.right, acc)
    else:
        raise TypeError(f"oracle only handles quantifier-free formulas: {f}")


def _formula_value(f, assignment) -> Fraction:
    if isinstance(f, (Pred, Sim)):
        key = _atom_key(f)
        if key is None:
            return ONE
        return assignment[key]
    if isinstance(f, Not):
        return ONE - _formula_value(f.body, assignment)
    if isinstance(f, And):
        return min(_formula_value(f.left, assignment), _formula_value(f.right, assignment))
    if isinstance(f, Or):
        return max(_formula_value(f.left, assignment), _formula_value(f.right, assignment))
    if isinstance(f, Implies):
        return max(ONE - _formula_value(f.left, assignment), _formula_value(f.right, assignment))
    raise TypeError(f)


def qf_valid(s: Sequent, param, tolerant: bool) -> bool:
    """Direct enumeration over atom-class assignments (one class per ground
    atom, similarity canonicalized, reflexive similarity pinned to 1); in
    tolerant mode the two base atoms of each similarity class join the
    vocabulary and the tolerance constraint is enforced on them.

    Only injective constant denotations are enumerated: merging constants
    only ever forces extra equalities, so it can never create a countermodel
    that the injective reading lacks.
    """
    from tolerance_lab.semantics import FiniteValues
    assert isinstance(param.values, FiniteValues), "oracle needs a finite value set"
    values = tuple(param.values)

    keys: list = []
    for f in list(s.left) + list(s.right):
        _collect_atoms(f, keys)
    sim_keys = [k for k in keys if k[0] == "s"]
    if tolerant:
        for (_, base, (a, b)) in sim_keys:
            for t in (a, b):
                pk = ("p", base, (t,))
                if pk not in keys:
                    keys.append(pk)

    t_set, f_set = param.premise_set, param.conclusion_set
    for combo in itertools.product(values, repeat=len(keys)):
        assignment = dict(zip(keys, combo))
        if tolerant:
            ok = True
            for key in sim_keys:
                sv = assignment[key]
                if in_boundary(f_set, sv):
                    continue
                _, base, (a, b) = key
                va = assignment[("p", base, (a,))]
                vb = assignment[("p", base, (b,))]
                if (in_boundary(t_set, va) and in_boundary(f_set, vb)) or (
                    in_boundary(t_set, vb) and in_boundary(f_set, va)
                ):
                    ok = False
                    break
            if not ok:
                continue
        if all(in_boundary(t_set, _formula_value(f, assignment)) for f in s.left) and all(
            in_boundary(f_set, _formula_value(f, assignment)) for f in s.right
        ):
            return False  # countermodel found
    return True
