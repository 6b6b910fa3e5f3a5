"""Degree-valued models over finite domains, with exact rational values.

Values are ``fractions.Fraction`` throughout: complement, min/max, and
membership at the 1/2 boundary must be exact, because validity flips there.
Evaluation is compositional: negation is complement, conjunction is min,
disjunction is max, the conditional is max(1-x, y), and quantifiers take
min/max over the (finite) domain.

Similarity tables are reflexive and symmetric by construction; the model
constructor rejects anything else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .syntax import (
    And, Constant, Exists, Forall, Formula, Implies, Not, Or, Pred,
    Sequent, Signature, Sim, Variable,
)

Value = Fraction
ZERO = Fraction(0)
HALF = Fraction(1, 2)
ONE = Fraction(1)


class ModelError(ValueError):
    """Raised when a model violates a structural constraint."""


class EvalError(KeyError):
    """Raised when evaluation hits an unmapped constant or unbound variable."""


def as_value(x) -> Fraction:
    """Exact conversion to a rational in [0, 1].

    Accepts Fractions, ints, and strings like ``3/5`` or ``0.6`` (decimal
    strings convert exactly, never through a float).
    """
    if isinstance(x, float):
        raise ModelError(f"refusing float {x!r}: pass a Fraction or string for exactness")
    v = Fraction(x)
    if not (ZERO <= v <= ONE):
        raise ModelError(f"value {v} is outside [0, 1]")
    return v


# ---------------------------------------------------------------------------
# Value sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteValues:
    """A finite set of values, kept sorted and deduplicated."""

    values: tuple[Fraction, ...]

    @staticmethod
    def of(values: Iterable) -> "FiniteValues":
        return FiniteValues(tuple(sorted({as_value(v) for v in values})))

    def __contains__(self, x: Fraction) -> bool:
        return x in self.values

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.values) + "}"


@dataclass(frozen=True)
class UnitInterval:
    """The whole interval [0, 1]."""

    def __contains__(self, x: Fraction) -> bool:
        return ZERO <= x <= ONE

    def __str__(self) -> str:
        return "[0,1]"


ValueSet = FiniteValues | UnitInterval


def is_closed(vs: ValueSet) -> tuple[bool, Fraction | None]:
    """Is the set closed under complement (and, trivially when finite, under
    greatest lower/least upper bounds)?  On failure returns a witness value
    whose complement is missing."""
    if isinstance(vs, UnitInterval):
        return True, None
    for v in vs.values:
        if ONE - v not in vs:
            return False, v
    return True, None


def value_closure(seed: Iterable) -> FiniteValues:
    """Smallest finite set containing ``seed``, 0, and 1, closed under
    complement.  Min/max add nothing to a finite set."""
    out = {ZERO, ONE}
    for x in seed:
        v = as_value(x)
        out.add(v)
        out.add(ONE - v)
    return FiniteValues.of(out)


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

def _sim_key(base: str, d: str, e: str) -> tuple[str, str, str]:
    return (base, d, e) if d <= e else (base, e, d)


class Model:
    """A finite domain plus an interpretation of constants and predicates.

    ``preds`` maps (predicate name, element tuple) to a value; ``sims`` maps
    (base predicate, element, element) to a value and is stored under a
    canonical pair order, so lookups are symmetric.  Diagonal similarity is
    always 1 and need not be stored.
    """

    __slots__ = ("domain", "consts", "preds", "sims")

    def __init__(
        self,
        domain: Iterable[str],
        consts: Mapping[str, str] | None = None,
        preds: Mapping[tuple[str, tuple[str, ...]], object] | None = None,
        sims: Mapping[tuple[str, str, str], object] | None = None,
    ):
        self.domain: tuple[str, ...] = tuple(domain)
        if not self.domain:
            raise ModelError("domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise ModelError("domain elements must be distinct")
        dset = set(self.domain)

        self.consts: dict[str, str] = dict(consts or {})
        for c, d in self.consts.items():
            if d not in dset:
                raise ModelError(f"constant {c} maps to unknown element {d}")

        self.preds: dict[tuple[str, tuple[str, ...]], Fraction] = {}
        arities: dict[str, int] = {}
        for (name, elems), raw in (preds or {}).items():
            elems = tuple(elems)
            if any(e not in dset for e in elems):
                raise ModelError(f"predicate entry {name}{elems} uses unknown elements")
            prev = arities.setdefault(name, len(elems))
            if prev != len(elems):
                raise ModelError(f"predicate {name} has entries of mixed arity")
            self.preds[(name, elems)] = as_value(raw)

        self.sims: dict[tuple[str, str, str], Fraction] = {}
        for (base, d, e), raw in (sims or {}).items():
            if d not in dset or e not in dset:
                raise ModelError(f"similarity entry {base}({d},{e}) uses unknown elements")
            v = as_value(raw)
            if d == e:
                if v != ONE:
                    raise ModelError(f"similarity must be reflexive: {base}({d},{d}) = {v}")
                continue
            key = _sim_key(base, d, e)
            if key in self.sims and self.sims[key] != v:
                raise ModelError(
                    f"conflicting similarity values for {base}({d},{e}): "
                    f"{self.sims[key]} vs {v}"
                )
            self.sims[key] = v

    # --- lookups ---

    def element(self, constant: str) -> str:
        try:
            return self.consts[constant]
        except KeyError:
            raise EvalError(f"unmapped constant {constant!r}") from None

    def pred_value(self, name: str, elems: tuple[str, ...]) -> Fraction:
        try:
            return self.preds[(name, elems)]
        except KeyError:
            raise EvalError(f"no value for {name}{elems}") from None

    def sim_value(self, base: str, d: str, e: str) -> Fraction:
        if d == e:
            return ONE
        try:
            return self.sims[_sim_key(base, d, e)]
        except KeyError:
            raise EvalError(f"no similarity value for {base}({d},{e})") from None

    def sim_bases(self) -> frozenset[str]:
        return frozenset(base for (base, _, _) in self.sims)

    def pred_names(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for (name, elems) in self.preds:
            out[name] = len(elems)
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Model":
        """Rebuild the model under a domain-element renaming (isomorphism)."""
        return Model(
            tuple(mapping[d] for d in self.domain),
            {c: mapping[d] for c, d in self.consts.items()},
            {(n, tuple(mapping[e] for e in es)): v for (n, es), v in self.preds.items()},
            {(b, mapping[d], mapping[e]): v for (b, d, e), v in self.sims.items()},
        )

    def __repr__(self) -> str:
        return f"Model(domain={self.domain!r}, consts={self.consts!r})"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _term_element(model: Model, t, env: Mapping[str, str]) -> str:
    if isinstance(t, Constant):
        return model.element(t.name)
    if isinstance(t, Variable):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name!r}") from None
    raise TypeError(f"not a term: {t!r}")


def evaluate(model: Model, f: Formula, env: Mapping[str, str] | None = None) -> Fraction:
    """The value of ``f`` in ``model`` under the variable assignment ``env``."""
    env = env or {}
    match f:
        case Pred(name, args):
            return model.pred_value(name, tuple(_term_element(model, t, env) for t in args))
        case Sim(base, left, right):
            return model.sim_value(
                base, _term_element(model, left, env), _term_element(model, right, env)
            )
        case Not(body):
            return ONE - evaluate(model, body, env)
        case And(a, b):
            return min(evaluate(model, a, env), evaluate(model, b, env))
        case Or(a, b):
            return max(evaluate(model, a, env), evaluate(model, b, env))
        case Implies(a, b):
            return max(ONE - evaluate(model, a, env), evaluate(model, b, env))
        case Forall(var, body):
            return min(
                evaluate(model, body, {**env, var: d}) for d in model.domain
            )
        case Exists(var, body):
            return max(
                evaluate(model, body, {**env, var: d}) for d in model.domain
            )
    raise TypeError(f"not a formula: {f!r}")


TieBreak = Callable[[str, tuple[str, ...]], int]


def crispify(model: Model, tie_break: TieBreak) -> Model:
    """Round every atom value to 0 or 1: above 1/2 up, below 1/2 down, and
    exactly 1/2 by ``tie_break(predicate, elements)`` (which must return 0
    or 1; similarity entries are passed as predicate ``~base`` with the pair
    in canonical order, so symmetry survives the rounding).
    """
    def rounded(v: Fraction, name: str, elems: tuple[str, ...]) -> Fraction:
        if v > HALF:
            return ONE
        if v < HALF:
            return ZERO
        choice = tie_break(name, elems)
        if choice not in (0, 1):
            raise ModelError(f"tie_break must return 0 or 1, got {choice!r}")
        return Fraction(choice)

    preds = {
        key: rounded(v, key[0], key[1]) for key, v in model.preds.items()
    }
    sims = {}
    for (base, d, e), v in model.sims.items():
        sims[(base, d, e)] = rounded(v, "~" + base, (d, e))
    return Model(model.domain, model.consts, preds, sims)


# ---------------------------------------------------------------------------
# Model enumeration
# ---------------------------------------------------------------------------

def domain_names(size: int) -> tuple[str, ...]:
    return tuple(f"d{i}" for i in range(1, size + 1))


def constant_assignments(
    constants: Iterable[str], domain: tuple[str, ...], surjective: bool = False
) -> Iterator[dict[str, str]]:
    """All ways of denoting the constants in the domain, in a fixed order.

    With ``surjective=True`` only assignments covering every element are
    produced (useful when unnamed elements would be dead weight).
    """
    names = sorted(constants)
    for image in itertools.product(domain, repeat=len(names)):
        if surjective and set(image) != set(domain):
            continue
        yield dict(zip(names, image))


def enumerate_models(
    signature: Signature,
    domain_size: int,
    values: FiniteValues,
    sim_constrained: bool = True,
    constant_maps: Iterable[Mapping[str, str]] | None = None,
) -> Iterator[Model]:
    """Every model on a fixed domain whose atom entries draw from ``values``.

    Similarity tables are generated reflexive-symmetric (one free value per
    unordered pair) when ``sim_constrained`` is set; otherwise no similarity
    entries are generated at all and the models only interpret the ordinary
    predicates.  Enumeration order is deterministic.
    """
    if domain_size < 1:
        raise ValueError("domain_size must be at least 1")
    domain = domain_names(domain_size)
    vals = tuple(values)

    pred_keys = [
        (name, elems)
        for name in sorted(signature.preds)
        for elems in itertools.product(domain, repeat=signature.preds[name])
    ]
    sim_keys: list[tuple[str, str, str]] = []
    if sim_constrained:
        for base in sorted(signature.sim_bases):
            for i, d in enumerate(domain):
                for e in domain[i + 1:]:
                    sim_keys.append((base, d, e))

    if constant_maps is None:
        constant_maps = constant_assignments(signature.constants, domain)

    for consts in constant_maps:
        for pred_vals in itertools.product(vals, repeat=len(pred_keys)):
            preds = dict(zip(pred_keys, pred_vals))
            for sim_vals in itertools.product(vals, repeat=len(sim_keys)):
                sims = dict(zip(sim_keys, sim_vals))
                yield Model(domain, dict(consts), preds, sims)


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

def format_model(model: Model) -> str:
    """Line-oriented text form; ``parse_model`` reads it back."""
    lines = ["domain " + " ".join(model.domain)]
    for c in sorted(model.consts):
        lines.append(f"const {c} = {model.consts[c]}")
    for (name, elems), v in sorted(model.preds.items()):
        lines.append(f"pred {name}({','.join(elems)}) = {v}")
    for (base, d, e), v in sorted(model.sims.items()):
        lines.append(f"sim {base}({d},{e}) = {v}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> Model:
    domain: tuple[str, ...] | None = None
    consts: dict[str, str] = {}
    preds: dict[tuple[str, tuple[str, ...]], Fraction] = {}
    sims: dict[tuple[str, str, str], Fraction] = {}

    def entry(line: str, lineno: int) -> tuple[str, tuple[str, ...], Fraction]:
        head, _, raw = line.partition("=")
        head = head.strip()
        if not raw.strip():
            raise ModelError(f"line {lineno}: missing value in {line!r}")
        name, _, rest = head.partition("(")
        if not rest.endswith(")"):
            raise ModelError(f"line {lineno}: malformed entry {line!r}")
        elems = tuple(e.strip() for e in rest[:-1].split(","))
        return name.strip(), elems, as_value(raw.strip())

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        kind, _, rest = stripped.partition(" ")
        if kind == "domain":
            domain = tuple(rest.split())
        elif kind == "const":
            name, _, elem = rest.partition("=")
            consts[name.strip()] = elem.strip()
        elif kind == "pred":
            name, elems, v = entry(rest, lineno)
            key = (name, elems)
            if key in preds and preds[key] != v:
                raise ModelError(f"line {lineno}: conflicting values for {name}{elems}")
            preds[key] = v
        elif kind == "sim":
            base, elems, v = entry(rest, lineno)
            if len(elems) != 2:
                raise ModelError(f"line {lineno}: similarity needs exactly two elements")
            key = _sim_key(base, *elems)
            if key in sims and sims[key] != v:
                raise ModelError(
                    f"line {lineno}: conflicting asymmetric similarity entries for "
                    f"{base}({elems[0]},{elems[1]})"
                )
            if elems[0] == elems[1] and v != ONE:
                raise ModelError(f"line {lineno}: diagonal similarity must be 1")
            if elems[0] != elems[1]:
                sims[key] = v
        else:
            raise ModelError(f"line {lineno}: unknown directive {kind!r}")
    if domain is None:
        raise ModelError("model file has no domain line")
    return Model(domain, consts, preds, sims)
