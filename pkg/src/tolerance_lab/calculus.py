"""Proof objects and proof search for the cut-free similarity calculus.

Sequent sides are sets, so contraction is implicit; K is the only
structural rule besides the axiom.  There is no Cut: composing two valid
tolerance steps is exactly what the calculus must refuse.  Eigenvariables
are fresh constants drawn from the reserved ``@e`` namespace; instantiation
pools for the quantifier rules may add ``@p`` constants.

``check_proof`` validates a tree node by node against the rule schemata and
reports the path to the first failure.  ``prove`` runs a bounded root-first
search whose output always passes ``check_proof``; its failure is a search
outcome, never a validity verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And, Constant, Exists, Forall, Formula, Implies, Not, Or, Pred, RuleName,
    Sequent, Sim, formula_key, parse_formula, parse_sequent, print_formula,
    print_sequent, sequent_constants, substitute,
    _ArityTracker,
)


@dataclass(frozen=True)
class ProofNode:
    conclusion: Sequent
    rule: RuleName
    premises: tuple["ProofNode", ...] = ()
    principal: Formula | None = None
    witness: Constant | None = None


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str | None = None


@dataclass(frozen=True)
class SearchFailure:
    reason: str
    expanded: int
    depth: int


_ARITY = {
    RuleName.Id: 0,
    RuleName.K: 1,
    RuleName.NotL: 1, RuleName.NotR: 1,
    RuleName.AndL: 1, RuleName.AndR: 2,
    RuleName.OrL: 2, RuleName.OrR: 1,
    RuleName.ImpL: 2, RuleName.ImpR: 1,
    RuleName.ForallL: 1, RuleName.ForallR: 1,
    RuleName.ExistsL: 1, RuleName.ExistsR: 1,
    RuleName.SimRef: 1, RuleName.SimSymL: 1, RuleName.SimSymR: 1,
    RuleName.Tol: 1,
}


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def _context_options(side: frozenset, principal: Formula) -> tuple[frozenset, ...]:
    """The contexts a schema side may stand for: with sets, the displayed
    principal may or may not also belong to the context."""
    return (side - {principal}, side)


def _node_error(node: ProofNode) -> str | None:
    rule = node.rule
    L, R = node.conclusion.left, node.conclusion.right
    expected = _ARITY.get(rule)
    if expected is None:
        return f"unknown rule {rule!r}"
    if len(node.premises) != expected:
        return f"{rule.value} takes {expected} premise(s), got {len(node.premises)}"
    phi = node.principal

    if rule is RuleName.Id:
        shared = L & R
        if not shared:
            return "no shared formula between the two sides"
        if phi is not None and phi not in shared:
            return "recorded principal is not shared between the two sides"
        return None

    if rule is RuleName.K:
        prem = node.premises[0].conclusion
        if not (prem.left <= L and prem.right <= R):
            return "premise sequent is not contained in the conclusion"
        return None

    if rule is RuleName.SimRef:
        if not isinstance(phi, Sim) or phi.left != phi.right:
            return "principal must be a reflexive similarity atom"
        prem = node.premises[0].conclusion
        if prem.left != L | {phi} or prem.right != R:
            return "premise must be the conclusion plus the reflexive atom on the left"
        return None

    if rule in (RuleName.SimSymL, RuleName.SimSymR):
        if not isinstance(phi, Sim):
            return "principal must be a similarity atom"
        flipped = Sim(phi.base, phi.right, phi.left)
        prem = node.premises[0].conclusion
        if rule is RuleName.SimSymL:
            if phi not in L:
                return "principal is not on the left of the conclusion"
            if prem.right != R:
                return "right side must not change"
            if not any(prem.left == ctx | {flipped} for ctx in _context_options(L, phi)):
                return "premise left side does not flip the principal"
        else:
            if phi not in R:
                return "principal is not on the right of the conclusion"
            if prem.left != L:
                return "left side must not change"
            if not any(prem.right == ctx | {flipped} for ctx in _context_options(R, phi)):
                return "premise right side does not flip the principal"
        return None

    if rule is RuleName.Tol:
        if not isinstance(phi, Sim):
            return "principal must be the similarity atom of the premise"
        pt = Pred(phi.base, (phi.left,))
        pu = Pred(phi.base, (phi.right,))
        if pt not in L:
            return f"conclusion is missing {print_formula(pt)} on the left"
        if pu not in R:
            return f"conclusion is missing {print_formula(pu)} on the right"
        prem = node.premises[0].conclusion
        if prem.left not in _context_options(L, pt):
            return "premise left side must be the conclusion's minus the base atom"
        if not any(prem.right == ctx | {phi} for ctx in _context_options(R, pu)):
            return "premise right side must swap the base atom for the similarity atom"
        return None

    prem = node.premises[0].conclusion

    if rule is RuleName.NotL:
        if not isinstance(phi, Not) or phi not in L:
            return "principal must be a negation on the left of the conclusion"
        if prem.right != R | {phi.body}:
            return "premise right side must add the negated formula"
        if prem.left not in _context_options(L, phi):
            return "premise left side does not match"
        return None

    if rule is RuleName.NotR:
        if not isinstance(phi, Not) or phi not in R:
            return "principal must be a negation on the right of the conclusion"
        if prem.left != L | {phi.body}:
            return "premise left side must add the negated formula"
        if prem.right not in _context_options(R, phi):
            return "premise right side does not match"
        return None

    if rule is RuleName.AndL:
        if not isinstance(phi, And) or phi not in L:
            return "principal must be a conjunction on the left"
        if prem.right != R:
            return "right side must not change"
        if not any(prem.left == ctx | {phi.left, phi.right} for ctx in _context_options(L, phi)):
            return "premise left side must add both conjuncts"
        return None

    if rule is RuleName.OrR:
        if not isinstance(phi, Or) or phi not in R:
            return "principal must be a disjunction on the right"
        if prem.left != L:
            return "left side must not change"
        if not any(prem.right == ctx | {phi.left, phi.right} for ctx in _context_options(R, phi)):
            return "premise right side must add both disjuncts"
        return None

    if rule is RuleName.ImpR:
        if not isinstance(phi, Implies) or phi not in R:
            return "principal must be a conditional on the right"
        if prem.left != L | {phi.left}:
            return "premise left side must add the antecedent"
        if not any(prem.right == ctx | {phi.right} for ctx in _context_options(R, phi)):
            return "premise right side must add the consequent"
        return None

    if rule is RuleName.AndR:
        if not isinstance(phi, And) or phi not in R:
            return "principal must be a conjunction on the right"
        p1, p2 = (n.conclusion for n in node.premises)
        for ctx in _context_options(R, phi):
            if (
                p1.left == L and p2.left == L
                and p1.right == ctx | {phi.left} and p2.right == ctx | {phi.right}
            ):
                return None
        return "premises do not split the conjunction"

    if rule is RuleName.OrL:
        if not isinstance(phi, Or) or phi not in L:
            return "principal must be a disjunction on the left"
        p1, p2 = (n.conclusion for n in node.premises)
        for ctx in _context_options(L, phi):
            if (
                p1.right == R and p2.right == R
                and p1.left == ctx | {phi.left} and p2.left == ctx | {phi.right}
            ):
                return None
        return "premises do not split the disjunction"

    if rule is RuleName.ImpL:
        if not isinstance(phi, Implies) or phi not in L:
            return "principal must be a conditional on the left"
        p1, p2 = (n.conclusion for n in node.premises)
        for ctx in _context_options(L, phi):
            if (
                p1.left == ctx and p1.right == R | {phi.left}
                and p2.left == ctx | {phi.right} and p2.right == R
            ):
                return None
        return "premises do not match the conditional split"

    if rule in (RuleName.ForallL, RuleName.ExistsR):
        on_left = rule is RuleName.ForallL
        want = Forall if on_left else Exists
        side = L if on_left else R
        if not isinstance(phi, want) or phi not in side:
            return "principal must be the quantified formula on the proper side"
        if not isinstance(node.witness, Constant):
            return "instantiation term missing"
        inst = substitute(phi.body, phi.var, node.witness)
        if on_left:
            if prem.right != R:
                return "right side must not change"
            if not any(prem.left == ctx | {inst} for ctx in _context_options(L, phi)):
                return "premise does not instantiate the quantifier"
        else:
            if prem.left != L:
                return "left side must not change"
            if not any(prem.right == ctx | {inst} for ctx in _context_options(R, phi)):
                return "premise does not instantiate the quantifier"
        return None

    if rule in (RuleName.ForallR, RuleName.ExistsL):
        on_right = rule is RuleName.ForallR
        want = Forall if on_right else Exists
        side = R if on_right else L
        if not isinstance(phi, want) or phi not in side:
            return "principal must be the quantified formula on the proper side"
        a = node.witness
        if not isinstance(a, Constant):
            return "eigenvariable missing"
        used = sequent_constants(node.conclusion)
        if a.name in used:
            return "eigenvariable occurs in conclusion"
        inst = substitute(phi.body, phi.var, a)
        if on_right:
            if prem.left != L:
                return "left side must not change"
            if not any(prem.right == ctx | {inst} for ctx in _context_options(R, phi)):
                return "premise does not introduce the eigenvariable instance"
        else:
            if prem.right != R:
                return "right side must not change"
            if not any(prem.left == ctx | {inst} for ctx in _context_options(L, phi)):
                return "premise does not introduce the eigenvariable instance"
        return None

    return f"rule {rule.value} not handled"


def check_proof(node: ProofNode) -> CheckReport:
    """Verify every node against its rule schema; report the first failure."""
    def walk(n: ProofNode, path: tuple[int, ...]) -> CheckReport:
        reason = _node_error(n)
        if reason is not None:
            return CheckReport(False, path, reason)
        for i, child in enumerate(n.premises):
            report = walk(child, path + (i,))
            if not report.ok:
                return report
        return CheckReport(True)

    return walk(node, ())


def cut_node(left: ProofNode, right: ProofNode, cut_formula: Formula) -> CheckReport:
    """There is no Cut.  Any attempt to compose proofs through a shared
    formula is rejected outright; this exists so that tests can document
    the refusal."""
    del left, right, cut_formula
    return CheckReport(False, (), "Cut is not a rule of the calculus")


# ---------------------------------------------------------------------------
# Proof search
# ---------------------------------------------------------------------------

class _Searcher:
    def __init__(self, depth: int, term_pool_extra: int, tol_enabled: bool):
        self.max_depth = depth
        self.term_pool_extra = term_pool_extra
        self.tol_enabled = tol_enabled
        self.expanded = 0
        self.eigen_counter = 0
        # sequent -> deepest budget at which it failed without history pruning
        self.fail_cache: dict[Sequent, int] = {}

    def fresh_eigen(self, avoid: frozenset[str]) -> Constant:
        while True:
            name = f"@e{self.eigen_counter}"
            self.eigen_counter += 1
            if name not in avoid:
                return Constant(name)

    def pool(self, s: Sequent) -> list[Constant]:
        names = sorted(sequent_constants(s))
        extras = [f"@p{i}" for i in range(self.term_pool_extra)]
        return [Constant(n) for n in names + [e for e in extras if e not in names]]

    def search(self, s: Sequent, depth: int, history: frozenset) -> tuple[ProofNode | None, bool]:
        """Returns (proof, pruned): ``pruned`` records whether the failure
        may be an artifact of loop detection, which makes it uncacheable."""
        shared = s.left & s.right
        if shared:
            principal = min(shared, key=formula_key)
            return ProofNode(s, RuleName.Id, (), principal), False
        if depth <= 0:
            return None, True  # ran out of budget; deeper retries may differ
        cached = self.fail_cache.get(s)
        if cached is not None and cached >= depth:
            return None, False

        self.expanded += 1
        pruned_any = False
        child_history = history | {s}
        for rule, principal, witness, premises in self.moves(s):
            if any(q in child_history for q in premises):
                pruned_any = True
                continue
            children = []
            failed = False
            for q in premises:
                node, pruned = self.search(q, depth - 1, child_history)
                pruned_any = pruned_any or pruned
                if node is None:
                    failed = True
                    break
                children.append(node)
            if not failed:
                return ProofNode(s, rule, tuple(children), principal, witness), False
        if not pruned_any:
            prev = self.fail_cache.get(s, -1)
            self.fail_cache[s] = max(prev, depth)
        return None, pruned_any

    def moves(self, s: Sequent):
        L, R = s.left, s.right
        left = sorted(L, key=formula_key)
        right = sorted(R, key=formula_key)

        # Targeted similarity closures first: they finish branches.
        for f in right:
            if isinstance(f, Sim) and f.left == f.right:
                yield RuleName.SimRef, f, None, (Sequent(L | {f}, R),)
        for f in right:
            if isinstance(f, Sim) and Sim(f.base, f.right, f.left) in L:
                flipped = Sim(f.base, f.right, f.left)
                yield RuleName.SimSymR, f, None, (Sequent(L, (R - {f}) | {flipped}),)
        for f in left:
            if isinstance(f, Sim) and Sim(f.base, f.right, f.left) in R:
                flipped = Sim(f.base, f.right, f.left)
                yield RuleName.SimSymL, f, None, (Sequent((L - {f}) | {flipped}, R),)

        # Invertible single-premise rules.
        for f in left:
            if isinstance(f, Not):
                yield RuleName.NotL, f, None, (Sequent(L - {f}, R | {f.body}),)
                return
            if isinstance(f, And):
                yield RuleName.AndL, f, None, (Sequent((L - {f}) | {f.left, f.right}, R),)
                return
        for f in right:
            if isinstance(f, Not):
                yield RuleName.NotR, f, None, (Sequent(L | {f.body}, R - {f}),)
                return
            if isinstance(f, Or):
                yield RuleName.OrR, f, None, (Sequent(L, (R - {f}) | {f.left, f.right}),)
                return
            if isinstance(f, Implies):
                yield RuleName.ImpR, f, None, (
                    Sequent(L | {f.left}, (R - {f}) | {f.right}),
                )
                return

        # Eigenvariable rules (also invertible).
        avoid = sequent_constants(s)
        for f in right:
            if isinstance(f, Forall):
                a = self.fresh_eigen(avoid)
                inst = substitute(f.body, f.var, a)
                yield RuleName.ForallR, f, a, (Sequent(L, (R - {f}) | {inst}),)
                return
        for f in left:
            if isinstance(f, Exists):
                a = self.fresh_eigen(avoid)
                inst = substitute(f.body, f.var, a)
                yield RuleName.ExistsL, f, a, (Sequent((L - {f}) | {inst}, R),)
                return

        # Branching rules.
        for f in right:
            if isinstance(f, And):
                ctx = R - {f}
                yield RuleName.AndR, f, None, (
                    Sequent(L, ctx | {f.left}), Sequent(L, ctx | {f.right}),
                )
                return
        for f in left:
            if isinstance(f, Or):
                ctx = L - {f}
                yield RuleName.OrL, f, None, (
                    Sequent(ctx | {f.left}, R), Sequent(ctx | {f.right}, R),
                )
                return
            if isinstance(f, Implies):
                ctx = L - {f}
                yield RuleName.ImpL, f, None, (
                    Sequent(ctx, R | {f.left}), Sequent(ctx | {f.right}, R),
                )
                return

        # Atomic frontier: tolerance steps and quantifier instantiation.
        # Reflexivity additions are goal-directed only (handled above when a
        # diagonal similarity atom sits on the right); blind additions feed
        # nothing that the closure moves cannot already reach.
        if self.tol_enabled:
            for pt in left:
                if isinstance(pt, Pred) and len(pt.args) == 1:
                    for pu in right:
                        if isinstance(pu, Pred) and pu.name == pt.name and len(pu.args) == 1:
                            sim = Sim(pt.name, pt.args[0], pu.args[0])
                            yield RuleName.Tol, sim, None, (
                                Sequent(L, (R - {pu}) | {sim}),
                            )

        pool = self.pool(s)
        for f in left:
            if isinstance(f, Forall):
                for t in pool:
                    inst = substitute(f.body, f.var, t)
                    yield RuleName.ForallL, f, t, (Sequent(L | {inst}, R),)
        for f in right:
            if isinstance(f, Exists):
                for t in pool:
                    inst = substitute(f.body, f.var, t)
                    yield RuleName.ExistsR, f, t, (Sequent(L, R | {inst}),)


def prove(
    s: Sequent,
    depth: int = 20,
    term_pool_extra: int = 1,
    tol_enabled: bool = True,
) -> ProofNode | SearchFailure:
    """Bounded root-first proof search.

    Invertible rules are applied eagerly, eigenvariables are always fresh,
    quantifier instantiation draws from the constants in the branch plus a
    few reserve names, and loop detection forbids revisiting a sequent on
    the same branch.  Failure means only that no proof was found within the
    bounds.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    searcher = _Searcher(depth, term_pool_extra, tol_enabled)
    node, _pruned = searcher.search(s, depth, frozenset())
    if node is None:
        return SearchFailure("depth-exhausted", searcher.expanded, depth)
    return node


# ---------------------------------------------------------------------------
# Proof files
# ---------------------------------------------------------------------------

def format_proof(node: ProofNode) -> str:
    """Nested s-expression form; parse_proof reads it back bit-exactly."""
    def emit(n: ProofNode, indent: int) -> str:
        pad = "  " * indent
        parts = [f'{pad}(rule "{n.rule.value}"']
        parts.append(f'{pad}  (conclusion "{print_sequent(n.conclusion)}")')
        if n.principal is not None:
            parts.append(f'{pad}  (principal "{print_formula(n.principal)}")')
        if n.witness is not None:
            tag = "eigen" if n.rule in (RuleName.ForallR, RuleName.ExistsL) else "term"
            parts.append(f'{pad}  ({tag} "{n.witness.name}")')
        for child in n.premises:
            parts.append(f"{pad}  (premise")
            parts.append(emit(child, indent + 2))
            parts.append(f"{pad}  )")
        parts.append(f"{pad})")
        return "\n".join(parts)

    return emit(node, 0) + "\n"


class ProofParseError(ValueError):
    pass


def _tokenize_sexpr(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append(c)
            i += 1
        elif c == '"':
            j = text.index('"', i + 1)
            tokens.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def parse_proof(text: str) -> ProofNode:
    tokens = _tokenize_sexpr(text)
    pos = 0
    arities = _ArityTracker()

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ProofParseError("unexpected end of proof text")
        tok = tokens[pos]
        pos += 1
        if expected is not None and tok != expected:
            raise ProofParseError(f"expected {expected!r}, found {tok!r}")
        return tok

    def take_string() -> str:
        tok = take()
        if not (tok.startswith('"') and tok.endswith('"')):
            raise ProofParseError(f"expected a quoted string, found {tok!r}")
        return tok[1:-1]

    def node() -> ProofNode:
        take("(")
        take("rule")
        rule = RuleName(take_string())
        conclusion = None
        principal = None
        witness = None
        premises = []
        while tokens[pos] != ")":
            take("(")
            field = take()
            if field == "conclusion":
                conclusion = parse_sequent(take_string(), arities)
                take(")")
            elif field == "principal":
                principal = parse_formula(take_string(), arities)
                take(")")
            elif field in ("term", "eigen"):
                witness = Constant(take_string())
                take(")")
            elif field == "premise":
                premises.append(node())
                take(")")
            else:
                raise ProofParseError(f"unknown proof field {field!r}")
        take(")")
        if conclusion is None:
            raise ProofParseError("proof node has no conclusion")
        return ProofNode(conclusion, rule, tuple(premises), principal, witness)

    result = node()
    if pos != len(tokens):
        raise ProofParseError("trailing content after proof")
    return result
