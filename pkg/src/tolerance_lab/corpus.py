"""Seeded random formulas and sequents for the property suite.

Everything here is deterministic given a seed; the CLI and test suite read
the seed from the TOLERANCE_LAB_SEED environment variable when one is not
given explicitly.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction
from typing import Sequence

from .semantics import Model
from .syntax import (
    And, Constant, Exists, Forall, Formula, Implies, Not, Or, Pred, Sequent,
    Sim, Variable, sequent,
)

DEFAULT_SEED = 20260810

CONSTANTS = ("a", "b", "c")
PREDICATES = ("P", "Q")
SIM_BASES = ("P", "Q")


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("TOLERANCE_LAB_SEED")
    if raw is None:
        return default
    return int(raw)


def make_rng(seed: int | None = None) -> random.Random:
    return random.Random(seed_from_env() if seed is None else seed)


def random_atom(
    rng: random.Random,
    constants: Sequence[str] = CONSTANTS,
    allow_sim: bool = True,
) -> Formula:
    if allow_sim and rng.random() < 0.35:
        base = rng.choice(SIM_BASES)
        left, right = rng.choice(constants), rng.choice(constants)
        return Sim(base, Constant(left), Constant(right))
    name = rng.choice(PREDICATES)
    return Pred(name, (Constant(rng.choice(constants)),))


def random_formula(
    rng: random.Random,
    atom_budget: int,
    constants: Sequence[str] = CONSTANTS,
    allow_sim: bool = True,
) -> tuple[Formula, int]:
    """A random quantifier-free formula using at most ``atom_budget`` atoms,
    returning the formula and the number of atoms actually spent."""
    if atom_budget <= 1 or rng.random() < 0.4:
        f = random_atom(rng, constants, allow_sim)
        spent = 1
        while rng.random() < 0.3:
            f = Not(f)
        return f, spent
    left, used_left = random_formula(rng, atom_budget // 2, constants, allow_sim)
    right, used_right = random_formula(rng, atom_budget - used_left, constants, allow_sim)
    connective = rng.choice((And, Or, Implies))
    f = connective(left, right)
    if rng.random() < 0.15:
        f = Not(f)
    return f, used_left + used_right


def random_sequent(
    rng: random.Random,
    max_atoms: int = 4,
    max_constants: int = 3,
    allow_sim: bool = True,
) -> Sequent:
    constants = CONSTANTS[:max_constants]
    budget = rng.randint(1, max_atoms)
    left: list[Formula] = []
    right: list[Formula] = []
    while budget > 0:
        f, spent = random_formula(rng, rng.randint(1, budget), constants, allow_sim)
        budget -= spent
        if rng.random() < 0.5 and len(left) < 3:
            left.append(f)
        else:
            right.append(f)
    if not left and not right:
        right.append(random_atom(rng, constants, allow_sim))
    return sequent(left, right)


def generate_corpus(
    count: int,
    seed: int | None = None,
    max_atoms: int = 4,
    max_constants: int = 3,
    allow_sim: bool = True,
) -> list[Sequent]:
    rng = make_rng(seed)
    return [
        random_sequent(rng, max_atoms, max_constants, allow_sim)
        for _ in range(count)
    ]


# ---------------------------------------------------------------------------
# Random models and quantified formulas (for the crispification and
# evaluation property checks)
# ---------------------------------------------------------------------------

def random_value(rng: random.Random, choices: Sequence[Fraction] | None = None) -> Fraction:
    if choices is not None:
        return rng.choice(list(choices))
    q = rng.randint(1, 8)
    return Fraction(rng.randint(0, q), q)


def random_model(
    rng: random.Random,
    value_choices: Sequence[Fraction] | None = None,
    max_domain: int = 3,
) -> Model:
    """A random model interpreting the standard vocabulary: constants a, b,
    c, unary predicates P and Q, and similarity tables for both."""
    size = rng.randint(1, max_domain)
    domain = tuple(f"d{i}" for i in range(1, size + 1))
    consts = {c: rng.choice(domain) for c in CONSTANTS}
    preds = {}
    for name in PREDICATES:
        for d in domain:
            preds[(name, (d,))] = random_value(rng, value_choices)
    sims = {}
    for base in SIM_BASES:
        for i, d in enumerate(domain):
            for e in domain[i + 1:]:
                sims[(base, d, e)] = random_value(rng, value_choices)
    return Model(domain, consts, preds, sims)


def generalize(f: Formula, const: str, var: str, rng: random.Random) -> Formula:
    """Replace a constant by a variable and bind it with a random quantifier."""
    def sub_term(t):
        if isinstance(t, Constant) and t.name == const:
            return Variable(var)
        return t

    def walk(g: Formula) -> Formula:
        match g:
            case Pred(name, args):
                return Pred(name, tuple(sub_term(a) for a in args))
            case Sim(base, left, right):
                return Sim(base, sub_term(left), sub_term(right))
            case Not(body):
                return Not(walk(body))
            case And(a, b):
                return And(walk(a), walk(b))
            case Or(a, b):
                return Or(walk(a), walk(b))
            case Implies(a, b):
                return Implies(walk(a), walk(b))
            case Forall(v, body):
                return Forall(v, walk(body))
            case Exists(v, body):
                return Exists(v, walk(body))
        raise TypeError(f"not a formula: {g!r}")

    binder = Forall if rng.random() < 0.5 else Exists
    return binder(var, walk(f))


def random_closed_formula(
    rng: random.Random,
    atom_budget: int = 3,
    allow_quantifiers: bool = True,
) -> Formula:
    """A closed formula over the standard vocabulary, optionally wrapping
    random quantifiers around generalized constants."""
    f, _ = random_formula(rng, atom_budget)
    if allow_quantifiers:
        names = ["x", "y"]
        for const in CONSTANTS:
            if names and rng.random() < 0.35 and const in _constants_in(f):
                f = generalize(f, const, names.pop(), rng)
    return f


def _constants_in(f: Formula) -> frozenset[str]:
    from .syntax import constants
    return constants(f)
