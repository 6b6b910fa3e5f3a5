"""First-order syntax with similarity atoms: terms, formulas, sequents.

The concrete grammar (ASCII):

    atoms        P(t1,...,tn)
    similarity   t ~P u          (a binary atom tied to the base predicate P)
    connectives  !  &  |  ->     (precedence: ! > & > | > ->, -> right-assoc)
    quantifiers  forall x. A     exists x. A     (scope extends maximally right)
    sequent      F1, ..., Fm |- G1, ..., Gk      (either side may be empty)

Variables and constants are disjoint namespaces: an identifier is a
variable when it is declared by an enclosing binder or when it has the
conventional shape ``x``/``y``/``z`` with an optional number; every other
identifier in term position is a constant.  Names starting with ``@`` are
reserved for engine-generated constants (eigenvariables, term pools).
Sequent sides are sets: duplicates collapse and order is irrelevant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Union

# Identifiers of this shape are variables even outside a binder (they then
# show up as free); binders may declare any other name as a variable too.
_VARIABLE_SHAPE = re.compile(r"[xyz][0-9]*")


class ParseError(ValueError):
    """Syntax error with a byte offset and the tokens that were expected."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected: " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)


class ArityError(ParseError):
    """A predicate name was used with two different arities."""


class FreeVariableError(ParseError):
    """A formula that must be closed contains a free variable."""


# ---------------------------------------------------------------------------
# Terms and formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Variable]


@dataclass(frozen=True)
class Pred:
    """An ordinary predicate atom P(t1, ..., tn)."""

    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Sim:
    """A similarity atom ``t ~P u``, indexed by its base predicate name."""

    base: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Pred, Sim, Not, And, Or, Implies, Forall, Exists]


@dataclass(frozen=True)
class Sequent:
    """An argument with premise set ``left`` and conclusion set ``right``."""

    left: frozenset
    right: frozenset

    def __str__(self) -> str:
        return print_sequent(self)


def sequent(left: Iterable[Formula], right: Iterable[Formula]) -> Sequent:
    return Sequent(frozenset(left), frozenset(right))


class RuleName(Enum):
    """The rules of the similarity sequent calculus (there is no Cut)."""

    Id = "Id"
    K = "K"
    NotL = "NotL"
    NotR = "NotR"
    AndL = "AndL"
    AndR = "AndR"
    OrL = "OrL"
    OrR = "OrR"
    ImpL = "ImpL"
    ImpR = "ImpR"
    ForallL = "ForallL"
    ForallR = "ForallR"
    ExistsL = "ExistsL"
    ExistsR = "ExistsR"
    SimRef = "SimRef"
    SimSymL = "SimSymL"
    SimSymR = "SimSymR"
    Tol = "Tol"


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def free_variables(f: Formula) -> frozenset[str]:
    """Free variable names of ``f``; binders shadow."""
    match f:
        case Pred(_, args):
            return frozenset(t.name for t in args if isinstance(t, Variable))
        case Sim(_, left, right):
            return frozenset(t.name for t in (left, right) if isinstance(t, Variable))
        case Not(body):
            return free_variables(body)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return free_variables(a) | free_variables(b)
        case Forall(var, body) | Exists(var, body):
            return free_variables(body) - {var}
    raise TypeError(f"not a formula: {f!r}")


def substitute(f: Formula, var: str, t: Constant) -> Formula:
    """Replace free occurrences of ``var`` by the constant ``t``.

    The replacement is a constant, so no capture is possible.
    """
    def sub_term(u: Term) -> Term:
        if isinstance(u, Variable) and u.name == var:
            return t
        return u

    match f:
        case Pred(name, args):
            return Pred(name, tuple(sub_term(a) for a in args))
        case Sim(base, left, right):
            return Sim(base, sub_term(left), sub_term(right))
        case Not(body):
            return Not(substitute(body, var, t))
        case And(a, b):
            return And(substitute(a, var, t), substitute(b, var, t))
        case Or(a, b):
            return Or(substitute(a, var, t), substitute(b, var, t))
        case Implies(a, b):
            return Implies(substitute(a, var, t), substitute(b, var, t))
        case Forall(v, body):
            return f if v == var else Forall(v, substitute(body, var, t))
        case Exists(v, body):
            return f if v == var else Exists(v, substitute(body, var, t))
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    match f:
        case Not(body) | Forall(_, body) | Exists(_, body):
            yield from subformulas(body)
        case And(a, b) | Or(a, b) | Implies(a, b):
            yield from subformulas(a)
            yield from subformulas(b)


def atoms(f: Formula) -> Iterator[Formula]:
    """The atomic subformulas of ``f`` (with multiplicity)."""
    for g in subformulas(f):
        if isinstance(g, (Pred, Sim)):
            yield g


def constants(f: Formula) -> frozenset[str]:
    out = set()
    for g in atoms(f):
        ts = g.args if isinstance(g, Pred) else (g.left, g.right)
        out.update(t.name for t in ts if isinstance(t, Constant))
    return frozenset(out)


def sequent_constants(s: Sequent) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for f in s.left | s.right:
        out |= constants(f)
    return out


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, (Forall, Exists)) for g in subformulas(f))


def sequent_is_quantifier_free(s: Sequent) -> bool:
    return all(is_quantifier_free(f) for f in s.left | s.right)


@dataclass
class Signature:
    """Predicate arities, similarity bases, and constants of a problem."""

    preds: dict[str, int]
    sim_bases: frozenset[str]
    constants: frozenset[str]


def signature_of(formulas: Iterable[Formula]) -> Signature:
    preds: dict[str, int] = {}
    bases: set[str] = set()
    consts: set[str] = set()
    for f in formulas:
        for g in atoms(f):
            if isinstance(g, Pred):
                prev = preds.setdefault(g.name, len(g.args))
                if prev != len(g.args):
                    raise ArityError(
                        f"predicate {g.name} used with arity {len(g.args)} after arity {prev}",
                        0,
                    )
                ts: tuple[Term, ...] = g.args
            else:
                bases.add(g.base)
                ts = (g.left, g.right)
            consts.update(t.name for t in ts if isinstance(t, Constant))
    return Signature(preds, frozenset(bases), frozenset(consts))


def sequent_signature(s: Sequent) -> Signature:
    return signature_of(list(s.left) + list(s.right))


# ---------------------------------------------------------------------------
# Lexer / parser
# ---------------------------------------------------------------------------

_PUNCT = ("->", "|-", "(", ")", ",", ".", "!", "&", "|", "~")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, offset) triples; kind is 'ident' or 'punct'."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        two = text[i:i + 2]
        if two in ("->", "|-"):
            tokens.append(("punct", two, i))
            i += 2
            continue
        if c in "(),.!&|~":
            tokens.append(("punct", c, i))
            i += 1
            continue
        if c.isalpha() or c == "_" or c == "@":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return tokens


class _ArityTracker:
    """Fixes each predicate name's arity across one problem.

    A similarity base modulates a unary predicate, so using a name both as a
    base and as a non-unary predicate is rejected.
    """

    def __init__(self) -> None:
        self.arities: dict[str, int] = {}
        self.bases: set[str] = set()

    def use_pred(self, name: str, arity: int, offset: int) -> None:
        prev = self.arities.get(name)
        if prev is not None and prev != arity:
            raise ArityError(
                f"predicate {name} used with arity {arity}, but earlier use had arity {prev}",
                offset,
            )
        if name in self.bases and arity != 1:
            raise ArityError(
                f"predicate {name} is a similarity base and must be unary, got arity {arity}",
                offset,
            )
        self.arities[name] = arity

    def use_base(self, name: str, offset: int) -> None:
        prev = self.arities.get(name)
        if prev is not None and prev != 1:
            raise ArityError(
                f"similarity base {name} was used as a predicate of arity {prev}",
                offset,
            )
        self.bases.add(name)


class _Parser:
    def __init__(self, text: str, arities: _ArityTracker | None = None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.bound: list[str] = []
        self.arities = arities if arities is not None else _ArityTracker()

    # --- token plumbing ---

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _offset(self) -> int:
        tok = self._peek()
        return tok[2] if tok else len(self.text)

    def _take(self) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def _expect(self, value: str) -> None:
        tok = self._peek()
        if tok is None or tok[1] != value:
            raise ParseError(
                f"found {tok[1]!r}" if tok else "unexpected end of input",
                self._offset(),
                frozenset({value}),
            )
        self.pos += 1

    def _at(self, value: str) -> bool:
        tok = self._peek()
        return tok is not None and tok[1] == value

    # --- grammar ---

    def parse_formula(self) -> Formula:
        f = self._implication()
        tok = self._peek()
        if tok is not None and tok[1] not in (",", "|-", ")"):
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return f

    def _implication(self) -> Formula:
        left = self._disjunction()
        if self._at("->"):
            self._take()
            return Implies(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        f = self._conjunction()
        while self._at("|"):
            self._take()
            f = Or(f, self._conjunction())
        return f

    def _conjunction(self) -> Formula:
        f = self._unary()
        while self._at("&"):
            self._take()
            f = And(f, self._unary())
        return f

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        if tok[1] == "!":
            self._take()
            return Not(self._unary())
        if tok[0] == "ident" and tok[1] in ("forall", "exists"):
            return self._quantifier()
        return self._atomish()

    def _quantifier(self) -> Formula:
        kind, word, offset = self._take()
        vtok = self._peek()
        if vtok is None or vtok[0] != "ident":
            raise ParseError("quantifier needs a variable", self._offset(), frozenset({"<identifier>"}))
        if vtok[1] in ("forall", "exists"):
            raise ParseError(f"{vtok[1]!r} cannot be a variable name", vtok[2])
        var = self._take()[1]
        self._expect(".")
        self.bound.append(var)
        try:
            body = self._implication()
        finally:
            self.bound.pop()
        return Forall(var, body) if word == "forall" else Exists(var, body)

    def _atomish(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        if tok[1] == "(":
            self._take()
            f = self._implication()
            self._expect(")")
            return self._maybe_sim_left(f, tok[2])
        if tok[0] == "ident":
            kind, name, offset = self._take()
            if self._at("("):
                return self._predicate(name, offset)
            term = self._make_term(name)
            return self._sim_from(term, offset)
        raise ParseError(
            f"found {tok[1]!r}", tok[2],
            frozenset({"(", "!", "forall", "exists", "<identifier>"}),
        )

    def _maybe_sim_left(self, f: Formula, offset: int) -> Formula:
        # "(t) ~P u" is not in the grammar; a parenthesized group is a formula.
        if self._at("~"):
            raise ParseError("similarity takes a plain term on the left", self._offset())
        return f

    def _predicate(self, name: str, offset: int) -> Formula:
        self._expect("(")
        args = [self._term()]
        while self._at(","):
            self._take()
            args.append(self._term())
        self._expect(")")
        self.arities.use_pred(name, len(args), offset)
        return Pred(name, tuple(args))

    def _sim_from(self, left: Term, offset: int) -> Formula:
        if not self._at("~"):
            raise ParseError(
                "a bare term is not a formula", offset, frozenset({"~", "("}),
            )
        self._take()
        btok = self._peek()
        if btok is None or btok[0] != "ident":
            raise ParseError("similarity needs a base predicate name", self._offset(),
                             frozenset({"<identifier>"}))
        base = self._take()[1]
        self.arities.use_base(base, btok[2])
        right = self._term()
        return Sim(base, left, right)

    def _term(self) -> Term:
        tok = self._peek()
        if tok is None or tok[0] != "ident":
            raise ParseError(
                f"found {tok[1]!r}" if tok else "unexpected end of input",
                self._offset(), frozenset({"<identifier>"}),
            )
        return self._make_term(self._take()[1])

    def _make_term(self, name: str) -> Term:
        if name in ("forall", "exists"):
            raise ParseError(f"{name!r} is reserved and cannot be a term", self._offset())
        if name in self.bound or _VARIABLE_SHAPE.fullmatch(name):
            return Variable(name)
        return Constant(name)

    def parse_sequent(self) -> Sequent:
        left: list[Formula] = []
        right: list[Formula] = []
        if not self._at("|-"):
            left.append(self._implication())
            while self._at(","):
                self._take()
                left.append(self._implication())
        self._expect("|-")
        if self._peek() is not None:
            right.append(self._implication())
            while self._at(","):
                self._take()
                right.append(self._implication())
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return sequent(left, right)


def parse_formula(text: str, _arities: _ArityTracker | None = None) -> Formula:
    """Parse a single formula; the result round-trips through print_formula."""
    parser = _Parser(text, _arities)
    f = parser.parse_formula()
    if parser._peek() is not None:
        tok = parser._peek()
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return f


def parse_sequent(text: str, _arities: _ArityTracker | None = None) -> Sequent:
    """Parse ``Γ |- Δ``; both sides are de-duplicated and must be closed."""
    s = _Parser(text, _arities).parse_sequent()
    for f in s.left | s.right:
        fv = free_variables(f)
        if fv:
            raise FreeVariableError(
                f"free variable {sorted(fv)[0]!r} in {print_formula(f)!r}", 0,
            )
    return s


def parse_sequent_lines(text: str) -> list[Sequent]:
    """Parse a corpus file: one sequent per line, ``#`` comments, blank lines.

    Predicate arities are fixed across the whole file.
    """
    tracker = _ArityTracker()
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            out.append(parse_sequent(stripped, tracker))
        except ParseError as e:
            raise type(e)(f"line {lineno}: {e}", e.offset, e.expected) from e
    return out


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

# Precedence levels, loosest first.
_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 0, 1, 2, 3


def _print(f: Formula, prec: int) -> str:
    match f:
        case Pred(name, args):
            return f"{name}({', '.join(t.name for t in args)})"
        case Sim(base, left, right):
            s = f"{left.name} ~{base} {right.name}"
            return s
        case Not(body):
            return "!" + _print(body, _PREC_UNARY)
        case And(a, b):
            s = f"{_print(a, _PREC_AND)} & {_print(b, _PREC_UNARY)}"
            return f"({s})" if prec > _PREC_AND else s
        case Or(a, b):
            s = f"{_print(a, _PREC_OR)} | {_print(b, _PREC_AND)}"
            return f"({s})" if prec > _PREC_OR else s
        case Implies(a, b):
            s = f"{_print(a, _PREC_OR)} -> {_print(b, _PREC_IMP)}"
            return f"({s})" if prec > _PREC_IMP else s
        case Forall(var, body):
            s = f"forall {var}. {_print(body, _PREC_IMP)}"
            return f"({s})" if prec > _PREC_IMP else s
        case Exists(var, body):
            s = f"exists {var}. {_print(body, _PREC_IMP)}"
            return f"({s})" if prec > _PREC_IMP else s
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Canonical text; parsing it back yields a structurally equal formula."""
    return _print(f, _PREC_IMP)


def formula_key(f: Formula) -> str:
    return print_formula(f)


def print_sequent(s: Sequent) -> str:
    left = ", ".join(sorted(print_formula(f) for f in s.left))
    right = ", ".join(sorted(print_formula(f) for f in s.right))
    return f"{left} |- {right}".strip()
