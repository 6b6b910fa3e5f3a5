"""Consequence parameters: a value space V, a premise-status set T, and a
conclusion-status set F.

A valid parameter has {0,1} inside a complement-closed V, 1 in T which sits
inside (1/2, 1] and is upward closed, and 0 in F which sits inside [0, 1/2)
and is downward closed.  A countermodel for the parameter maps every atom
into V, every premise into T, and every conclusion into F.

Three properties of a parameter drive everything downstream:

* proper     -- some value of V escapes T and F entirely;
* symmetric  -- T and F mirror each other under x -> 1-x;
* open       -- the status boundaries cannot be reached as limits from
                outside (decided by endpoint analysis for interval V;
                automatic for finite V, where suprema are attained).

Witnesses accompany every failed check and re-verify independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .semantics import FiniteValues, HALF, ONE, UnitInterval, ValueSet, ZERO, as_value, is_closed


# ---------------------------------------------------------------------------
# Boundary sets (the shapes allowed for T and F)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitSet:
    values: frozenset

    @staticmethod
    def of(values) -> "ExplicitSet":
        return ExplicitSet(frozenset(as_value(v) for v in values))

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in sorted(self.values)) + "}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    lo_open: bool
    hi: Fraction
    hi_open: bool

    def __str__(self) -> str:
        return (
            ("(" if self.lo_open else "[")
            + f"{self.lo},{self.hi}"
            + (")" if self.hi_open else "]")
        )


BoundarySet = ExplicitSet | Interval


def bs_contains(bs: BoundarySet, x: Fraction) -> bool:
    if isinstance(bs, ExplicitSet):
        return x in bs.values
    if x < bs.lo or x > bs.hi:
        return False
    if x == bs.lo and bs.lo_open:
        return False
    if x == bs.hi and bs.hi_open:
        return False
    return True


def bs_is_empty(bs: BoundarySet) -> bool:
    if isinstance(bs, ExplicitSet):
        return not bs.values
    if bs.lo > bs.hi:
        return True
    return bs.lo == bs.hi and (bs.lo_open or bs.hi_open)


def bs_mirror(bs: BoundarySet) -> BoundarySet:
    """The image under x -> 1-x."""
    if isinstance(bs, ExplicitSet):
        return ExplicitSet(frozenset(ONE - v for v in bs.values))
    return Interval(ONE - bs.hi, bs.hi_open, ONE - bs.lo, bs.lo_open)


def _normalize(bs: BoundarySet) -> BoundarySet:
    """Degenerate and empty intervals become explicit sets."""
    if isinstance(bs, Interval):
        if bs_is_empty(bs):
            return ExplicitSet(frozenset())
        if bs.lo == bs.hi:
            return ExplicitSet(frozenset({bs.lo}))
    return bs


def bs_equal(a: BoundarySet, b: BoundarySet) -> bool:
    a, b = _normalize(a), _normalize(b)
    if isinstance(a, ExplicitSet) and isinstance(b, ExplicitSet):
        return a.values == b.values
    if isinstance(a, Interval) and isinstance(b, Interval):
        return a == b
    # A nondegenerate interval holds infinitely many points; a finite set cannot.
    return False


def _endpoints(bs: BoundarySet) -> set[Fraction]:
    if isinstance(bs, ExplicitSet):
        return set(bs.values)
    return {bs.lo, bs.hi}


def point_in_difference(a: BoundarySet, b: BoundarySet) -> Fraction | None:
    """Some rational in ``a`` but not in ``b``, if one exists in [0, 1]."""
    grid = sorted(_endpoints(a) | _endpoints(b) | {ZERO, ONE})
    candidates = list(grid)
    for lo, hi in zip(grid, grid[1:]):
        candidates.append((lo + hi) / 2)
    for x in candidates:
        if ZERO <= x <= ONE and bs_contains(a, x) and not bs_contains(b, x):
            return x
    return None


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Parameter:
    values: ValueSet
    premise_set: BoundarySet
    conclusion_set: BoundarySet
    name: str | None = None

    def __str__(self) -> str:
        return self.name or format_parameter(self)


@dataclass(frozen=True)
class Violation:
    clause: str
    witness: object
    message: str


def validate_parameter(p: Parameter) -> Violation | None:
    """Check the defining conditions; report the first violated clause."""
    v, t, f = p.values, p.premise_set, p.conclusion_set

    if isinstance(v, FiniteValues):
        if ZERO not in v or ONE not in v:
            return Violation("values", None, "value set must contain 0 and 1")
        ok, witness = is_closed(v)
        if not ok:
            return Violation(
                "values", witness,
                f"value set is not closed under complement: {witness} is in, {ONE - witness} is not",
            )

    if not bs_contains(t, ONE):
        return Violation("premise-set", ONE, "premise set must contain 1")
    low = point_in_difference(t, Interval(HALF, True, ONE, False))
    if low is not None:
        return Violation(
            "premise-set", low, f"premise set must sit inside (1/2, 1]: contains {low}"
        )
    up_w = _upset_witness(t)
    if up_w is not None:
        x, y = up_w
        return Violation(
            "premise-set", x,
            f"premise set is not upward closed: contains {x} but not {y}",
        )

    if not bs_contains(f, ZERO):
        return Violation("conclusion-set", ZERO, "conclusion set must contain 0")
    high = point_in_difference(f, Interval(ZERO, False, HALF, True))
    if high is not None:
        return Violation(
            "conclusion-set", high, f"conclusion set must sit inside [0, 1/2): contains {high}"
        )
    down_w = _downset_witness(f)
    if down_w is not None:
        x, y = down_w
        return Violation(
            "conclusion-set", x,
            f"conclusion set is not downward closed: contains {x} but not {y}",
        )
    return None


def _upset_witness(t: BoundarySet) -> tuple[Fraction, Fraction] | None:
    """A pair (x, y) with x in T, x < y <= 1, y not in T; None when T is an upset."""
    t = _normalize(t)
    if isinstance(t, ExplicitSet):
        for x in sorted(t.values):
            if x < ONE:
                y = (x + ONE) / 2
                if not bs_contains(t, y):
                    return (x, y)
        return None
    # Intervals: an upset of [0,1] must reach 1 and include it.
    if bs_is_empty(t):
        return None
    if t.hi < ONE or t.hi_open:
        x = t.lo if not t.lo_open else (t.lo + t.hi) / 2
        return (x, ONE)
    return None


def _downset_witness(f: BoundarySet) -> tuple[Fraction, Fraction] | None:
    f = _normalize(f)
    if isinstance(f, ExplicitSet):
        for x in sorted(f.values, reverse=True):
            if x > ZERO:
                y = x / 2
                if not bs_contains(f, y):
                    return (x, y)
        return None
    if bs_is_empty(f):
        return None
    if f.lo > ZERO or f.lo_open:
        x = f.hi if not f.hi_open else (f.lo + f.hi) / 2
        return (x, ZERO)
    return None


def is_proper(p: Parameter) -> tuple[bool, Fraction | None]:
    """True (with a witness value) when some value of V avoids both statuses."""
    t, f = p.premise_set, p.conclusion_set
    if isinstance(p.values, UnitInterval):
        # 1/2 is never in T (inside (1/2,1]) nor in F (inside [0,1/2)).
        return True, HALF
    if HALF in p.values:
        return True, HALF
    for x in p.values:
        if not bs_contains(t, x) and not bs_contains(f, x):
            return True, x
    return False, None


def is_symmetric(p: Parameter) -> tuple[bool, Fraction | None]:
    """True when x is in T exactly if 1-x is in F.  The witness, when the
    check fails, is an x with (x in T) xor (1-x in F)."""
    t = p.premise_set
    mirror_f = bs_mirror(p.conclusion_set)
    if bs_equal(t, mirror_f):
        return True, None
    w = point_in_difference(t, mirror_f)
    if w is None:
        w = point_in_difference(mirror_f, t)
    return False, w


@dataclass(frozen=True)
class OpenWitness:
    """Description of a subset of V whose bound reaches a status set that
    none of its members reach."""

    side: str  # "premise" or "conclusion"
    boundary: Fraction
    description: str

    def __str__(self) -> str:
        return self.description


def is_open(p: Parameter) -> tuple[bool, OpenWitness | None]:
    """Can a bound of a subset of V land in a status set that no member of
    the subset touches?  Never, when V is finite (bounds of finite sets are
    members).  For interval V this is an endpoint matter: an interval-shaped
    premise set must not contain its infimum, and dually for the conclusion
    set; the one-point sets {1} and {0} are treated as boundary-free."""
    if isinstance(p.values, FiniteValues):
        return True, None
    t = _normalize(p.premise_set)
    f = _normalize(p.conclusion_set)
    if isinstance(t, Interval) and not t.lo_open:
        b = t.lo
        return False, OpenWitness(
            "premise", b,
            f"X = {{x in V : x < {b}}} has least upper bound {b} in the premise set, "
            "but no member of X is in it",
        )
    if isinstance(f, Interval) and not f.hi_open:
        b = f.hi
        return False, OpenWitness(
            "conclusion", b,
            f"X = {{x in V : x > {b}}} has greatest lower bound {b} in the conclusion set, "
            "but no member of X is in it",
        )
    return True, None


def verify_open_witness(p: Parameter, w: OpenWitness) -> bool:
    """Re-check an openness witness: the boundary value must carry the status
    while everything strictly beyond it does not."""
    if not isinstance(p.values, UnitInterval):
        return False
    b = w.boundary
    if w.side == "premise":
        t = p.premise_set
        probe = b - Fraction(1, 10 ** 6)
        return bs_contains(t, b) and not bs_contains(t, probe) and probe >= ZERO
    f = p.conclusion_set
    probe = b + Fraction(1, 10 ** 6)
    return bs_contains(f, b) and not bs_contains(f, probe) and probe <= ONE


@dataclass(frozen=True)
class ParameterProfile:
    proper: bool
    proper_witness: Fraction | None
    symmetric: bool
    symmetric_witness: Fraction | None
    open: bool
    open_witness: OpenWitness | None


def profile(p: Parameter) -> ParameterProfile:
    pr, pw = is_proper(p)
    sy, sw = is_symmetric(p)
    op, ow = is_open(p)
    return ParameterProfile(pr, pw, sy, sw, op, ow)


def in_premise_set(p: Parameter, x: Fraction) -> bool:
    return bs_contains(p.premise_set, x)


def in_conclusion_set(p: Parameter, x: Fraction) -> bool:
    return bs_contains(p.conclusion_set, x)


# ---------------------------------------------------------------------------
# Presets and the literal syntax
# ---------------------------------------------------------------------------

def _vn_values(n: int) -> FiniteValues:
    return FiniteValues.of(Fraction(i, n - 1) for i in range(n))


def preset(name: str) -> Parameter:
    """Named parameters: CLASSICAL, ST, SMITH, VN(n) for n >= 2, DYADIC(k).

    VN(n) spreads n evenly spaced values with {1}/{0} statuses; DYADIC(k)
    truncates the dyadic value chain 1/2^i and (2^i-1)/2^i at depth k, with
    statuses [3/4, 1] and [0, 1/4].
    """
    key = name.strip().upper()
    if key == "CLASSICAL":
        return Parameter(
            FiniteValues.of([0, 1]), ExplicitSet.of([1]), ExplicitSet.of([0]), "CLASSICAL"
        )
    if key == "ST":
        return Parameter(
            FiniteValues.of([0, HALF, 1]), ExplicitSet.of([1]), ExplicitSet.of([0]), "ST"
        )
    if key == "SMITH":
        return Parameter(
            UnitInterval(),
            Interval(HALF, True, ONE, False),
            Interval(ZERO, False, HALF, True),
            "SMITH",
        )
    if key.startswith("VN(") and key.endswith(")"):
        n = int(key[3:-1])
        if n < 2:
            raise ValueError("VN(n) needs n >= 2")
        return Parameter(_vn_values(n), ExplicitSet.of([1]), ExplicitSet.of([0]), f"VN({n})")
    if key.startswith("DYADIC(") and key.endswith(")"):
        depth = int(key[7:-1])
        if depth < 1:
            raise ValueError("DYADIC(depth) needs depth >= 1")
        vals = {ZERO, ONE}
        for i in range(depth + 1):
            vals.add(Fraction(1, 2 ** i))
            vals.add(Fraction(2 ** i - 1, 2 ** i))
        return Parameter(
            FiniteValues.of(vals),
            Interval(Fraction(3, 4), False, ONE, False),
            Interval(ZERO, False, Fraction(1, 4), False),
            f"DYADIC({depth})",
        )
    raise ValueError(f"unknown preset {name!r}")


def _parse_value_list(body: str) -> list[Fraction]:
    body = body.strip()
    if not body:
        return []
    return [as_value(part.strip()) for part in body.split(",")]


def _parse_boundary(text: str) -> BoundarySet:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        return ExplicitSet(frozenset(_parse_value_list(text[1:-1])))
    if text[0] in "([" and text[-1] in ")]":
        lo_open = text[0] == "("
        hi_open = text[-1] == ")"
        parts = text[1:-1].split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed interval {text!r}")
        return Interval(as_value(parts[0].strip()), lo_open, as_value(parts[1].strip()), hi_open)
    raise ValueError(f"malformed boundary set {text!r}")


def _parse_values(text: str) -> ValueSet:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        return FiniteValues.of(_parse_value_list(text[1:-1]))
    if text.startswith("[") and text.endswith("]"):
        parts = text[1:-1].split(",")
        if len(parts) == 2 and as_value(parts[0].strip()) == ZERO and as_value(parts[1].strip()) == ONE:
            return UnitInterval()
        raise ValueError("interval value spaces other than [0,1] are not supported")
    raise ValueError(f"malformed value set {text!r}")


def parse_parameter(spec: str) -> Parameter:
    """A preset name, or a literal like ``V=[0,1] T=(1/2,1] F=[0,1/2)``."""
    spec = spec.strip()
    if "=" not in spec:
        return preset(spec)
    fields: dict[str, str] = {}
    for chunk in spec.split():
        key, _, val = chunk.partition("=")
        if not val:
            raise ValueError(f"malformed parameter field {chunk!r}")
        fields[key.strip().upper()] = val.strip()
    missing = {"V", "T", "F"} - set(fields)
    if missing:
        raise ValueError(f"parameter literal is missing {sorted(missing)}")
    p = Parameter(
        _parse_values(fields["V"]),
        _normalize(_parse_boundary(fields["T"])),
        _normalize(_parse_boundary(fields["F"])),
    )
    return p


def format_parameter(p: Parameter) -> str:
    v = "[0,1]" if isinstance(p.values, UnitInterval) else str(p.values)
    return f"V={v} T={p.premise_set} F={p.conclusion_set}".replace(", ", ",")


CLASSICAL = preset("CLASSICAL")
ST = preset("ST")
SMITH = preset("SMITH")
