"""Core data model: concepts, roles, axioms, knowledge bases.

Concepts are hash-consed and kept in negation normal form by their
constructors, so structural equality is identity (`is`) and every concept
owns a stable integer id plus a precomputed complement.  All values here are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

# concept kinds
TOP = "top"
BOT = "bot"
ATOM = "atom"
NOT = "not"
AND = "and"
OR = "or"
SOME = "some"
ONLY = "only"
ATLEAST = "atleast"
ATMOST = "atmost"
TYP = "typ"


class TypicalityError(ValueError):
    """Raised when a typicality concept shows up where the grammar forbids it."""


@dataclass(frozen=True)
class Role:
    """A role or its inverse.  inv(inv(R)) is never stored."""

    name: str
    inverted: bool = False

    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    @property
    def key(self) -> str:
        return f"inv({self.name})" if self.inverted else self.name

    def __repr__(self) -> str:
        return f"Role({self.key})"


class Concept:
    """An interned concept expression in negation normal form.

    Do not instantiate directly; use the constructor functions
    (atom, neg, conj, disj, some, only, at_least, at_most, typ).
    """

    __slots__ = ("kind", "name", "role", "num", "args", "key", "cid", "_neg")

    kind: str
    name: Optional[str]
    role: Optional[Role]
    num: Optional[int]
    args: tuple
    key: str
    cid: int
    _neg: Optional["Concept"]

    def __init__(self, kind, name, role, num, args, key, cid):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "cid", cid)
        object.__setattr__(self, "_neg", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Concept is immutable")

    def __repr__(self) -> str:
        return f"Concept({self.key})"

    def __lt__(self, other: "Concept") -> bool:
        return self.key < other.key

    @property
    def arg(self) -> "Concept":
        return self.args[0]

    def is_typ_free(self) -> bool:
        if self.kind == TYP:
            return False
        return all(a.is_typ_free() for a in self.args)


_INTERN: dict[str, Concept] = {}
_BY_ID: list[Concept] = []


def _mk(kind, name=None, role=None, num=None, args=()) -> Concept:
    if kind == ATOM:
        key = name
    elif kind in (TOP, BOT):
        key = "#" + kind
    elif kind == NOT:
        key = f"!({args[0].key})"
    elif kind == AND:
        key = "&(" + ",".join(a.key for a in args) + ")"
    elif kind == OR:
        key = "|(" + ",".join(a.key for a in args) + ")"
    elif kind == SOME:
        key = f"E[{role.key}]({args[0].key})"
    elif kind == ONLY:
        key = f"A[{role.key}]({args[0].key})"
    elif kind == ATLEAST:
        key = f">={num}[{role.key}]({args[0].key})"
    elif kind == ATMOST:
        key = f"<={num}[{role.key}]({args[0].key})"
    elif kind == TYP:
        key = f"T({args[0].key})"
    else:  # pragma: no cover
        raise ValueError(kind)
    got = _INTERN.get(key)
    if got is not None:
        return got
    c = Concept(kind, name, role, num, args, key, len(_BY_ID))
    _INTERN[key] = c
    _BY_ID.append(c)
    return c


def concept_by_id(cid: int) -> Concept:
    return _BY_ID[cid]


top: Concept = _mk(TOP)
bot: Concept = _mk(BOT)


def atom(name: str) -> Concept:
    return _mk(ATOM, name=name)


def neg(c: Concept) -> Concept:
    """Complement in NNF.  Not defined on typicality concepts."""
    if c._neg is not None:
        return c._neg
    if c.kind == TOP:
        n = bot
    elif c.kind == BOT:
        n = top
    elif c.kind == ATOM:
        n = _mk(NOT, args=(c,))
    elif c.kind == NOT:
        n = c.args[0]
    elif c.kind == AND:
        n = disj(*(neg(a) for a in c.args))
    elif c.kind == OR:
        n = conj(*(neg(a) for a in c.args))
    elif c.kind == SOME:
        n = only(c.role, neg(c.args[0]))
    elif c.kind == ONLY:
        n = some(c.role, neg(c.args[0]))
    elif c.kind == ATLEAST:
        # n >= 2 here: at_least normalizes 0 and 1 away
        n = at_most(c.num - 1, c.role, c.args[0])
    elif c.kind == ATMOST:
        n = at_least(c.num + 1, c.role, c.args[0])
    elif c.kind == TYP:
        raise TypicalityError("complement of a typicality concept is not in the language")
    else:  # pragma: no cover
        raise ValueError(c.kind)
    object.__setattr__(c, "_neg", n)
    object.__setattr__(n, "_neg", c)
    return n


def _flatten(kind: str, args: Iterable[Concept]) -> list[Concept]:
    out: list[Concept] = []
    for a in args:
        if a.kind == kind:
            out.extend(a.args)
        else:
            out.append(a)
    return out


def _assoc(kind: str, unit: Concept, zero: Concept, args: Iterable[Concept]) -> Concept:
    flat = _flatten(kind, args)
    seen: dict[str, Concept] = {}
    for a in flat:
        if a is zero:
            return zero
        if a is unit:
            continue
        seen[a.key] = a
    # complementary pair collapses to the absorbing element
    for a in seen.values():
        if a.kind != TYP and neg(a).key in seen:
            return zero
    items = sorted(seen.values(), key=lambda c: c.key)
    if not items:
        return unit
    if len(items) == 1:
        return items[0]
    return _mk(kind, args=tuple(items))


def conj(*args: Concept) -> Concept:
    return _assoc(AND, top, bot, args)


def disj(*args: Concept) -> Concept:
    return _assoc(OR, bot, top, args)


def some(role: Role, c: Concept) -> Concept:
    return _mk(SOME, role=role, args=(c,))


def only(role: Role, c: Concept) -> Concept:
    return _mk(ONLY, role=role, args=(c,))


def at_least(n: int, role: Role, c: Concept) -> Concept:
    if n < 0:
        raise ValueError("cardinality must be non-negative")
    if n == 0:
        return top
    if n == 1:
        return some(role, c)
    return _mk(ATLEAST, role=role, num=n, args=(c,))


def at_most(n: int, role: Role, c: Concept) -> Concept:
    if n < 0:
        raise ValueError("cardinality must be non-negative")
    if n == 0:
        return only(role, neg(c))
    return _mk(ATMOST, role=role, num=n, args=(c,))


def typ(c: Concept) -> Concept:
    if not c.is_typ_free():
        raise TypicalityError("nested typicality")
    return _mk(TYP, args=(c,))


def nnf(c: Concept) -> Concept:
    """Canonical negation normal form.

    Constructors already normalize, so this is a checked identity: it rejects
    typicality concepts and rebuilds through the smart constructors.
    """
    if not c.is_typ_free():
        raise TypicalityError("nnf is only defined on typicality-free concepts")
    return _rebuild(c)


def _rebuild(c: Concept) -> Concept:
    if c.kind in (TOP, BOT, ATOM):
        return c
    if c.kind == NOT:
        return neg(_rebuild(c.args[0]))
    if c.kind == AND:
        return conj(*(_rebuild(a) for a in c.args))
    if c.kind == OR:
        return disj(*(_rebuild(a) for a in c.args))
    if c.kind == SOME:
        return some(c.role, _rebuild(c.args[0]))
    if c.kind == ONLY:
        return only(c.role, _rebuild(c.args[0]))
    if c.kind == ATLEAST:
        return at_least(c.num, c.role, _rebuild(c.args[0]))
    if c.kind == ATMOST:
        return at_most(c.num, c.role, _rebuild(c.args[0]))
    raise TypicalityError("nnf is only defined on typicality-free concepts")


def atoms_of(c: Concept) -> set[str]:
    names: set[str] = set()
    stack = [c]
    while stack:
        d = stack.pop()
        if d.kind == ATOM:
            names.add(d.name)
        stack.extend(d.args)
    return names


def roles_of(c: Concept) -> set[str]:
    names: set[str] = set()
    stack = [c]
    while stack:
        d = stack.pop()
        if d.role is not None:
            names.add(d.role.name)
        stack.extend(d.args)
    return names


def typ_sources(c: Concept) -> set[Concept]:
    """All C with T(C) occurring in the given concept."""
    out: set[Concept] = set()
    stack = [c]
    while stack:
        d = stack.pop()
        if d.kind == TYP:
            out.add(d.args[0])
        stack.extend(d.args)
    return out


# ---------------------------------------------------------------------------
# role boxes
# ---------------------------------------------------------------------------


class RBox:
    """Role hierarchy plus transitivity declarations.

    The hierarchy closure is reflexive-transitive and closed under inverses
    (R <= S implies inv(R) <= inv(S)).  A role is simple iff no transitive
    role sits below it in the closure; only simple roles may appear in
    number restrictions.
    """

    def __init__(self, inclusions: Iterable[tuple[Role, Role]] = (), transitive: Iterable[str] = ()):
        self.inclusions: frozenset[tuple[Role, Role]] = frozenset(inclusions)
        self.transitive: frozenset[str] = frozenset(transitive)
        self._subsumers: dict[Role, frozenset[Role]] = {}
        base: dict[Role, set[Role]] = {}
        for sub, sup in self.inclusions:
            base.setdefault(sub, set()).add(sup)
            base.setdefault(sub.inverse(), set()).add(sup.inverse())
        self._base = base

    def subsumers(self, r: Role) -> frozenset[Role]:
        """All S with r <=* S (reflexive-transitive, inverse-closed)."""
        got = self._subsumers.get(r)
        if got is not None:
            return got
        seen = {r}
        todo = [r]
        while todo:
            q = todo.pop()
            for s in self._base.get(q, ()):
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
        result = frozenset(seen)
        self._subsumers[r] = result
        return result

    def is_subrole(self, r: Role, s: Role) -> bool:
        return s in self.subsumers(r)

    def is_transitive(self, r: Role) -> bool:
        return r.name in self.transitive

    def transitive_subroles(self, s: Role) -> tuple[Role, ...]:
        """Transitive roles q with q <=* s (used by the forall-propagation rule)."""
        out = []
        for q in self._all_roles():
            if self.is_transitive(q) and self.is_subrole(q, s):
                out.append(q)
        return tuple(out)

    def is_simple(self, r: Role) -> bool:
        return not self.transitive_subroles(r)

    def _all_roles(self) -> set[Role]:
        rs: set[Role] = set()
        for sub, sup in self.inclusions:
            rs.update((sub, sup, sub.inverse(), sup.inverse()))
        for name in self.transitive:
            rs.add(Role(name))
            rs.add(Role(name, True))
        return rs

    def __eq__(self, other):
        return (
            isinstance(other, RBox)
            and self.inclusions == other.inclusions
            and self.transitive == other.transitive
        )

    def __hash__(self):
        return hash((self.inclusions, self.transitive))

    def __repr__(self):
        return f"RBox(inclusions={sorted((a.key, b.key) for a, b in self.inclusions)}, transitive={sorted(self.transitive)})"


EMPTY_RBOX = RBox()


# ---------------------------------------------------------------------------
# axioms and knowledge bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConceptInclusion:
    """lhs <= rhs; lhs may be T(C), rhs is always typicality-free."""

    lhs: Concept
    rhs: Concept

    def __post_init__(self):
        if not self.rhs.is_typ_free():
            raise TypicalityError("T on right-hand side")
        if self.lhs.kind != TYP and not self.lhs.is_typ_free():
            raise TypicalityError("T may only appear outermost on the left-hand side")

    @property
    def defeasible(self) -> bool:
        return self.lhs.kind == TYP


@dataclass(frozen=True)
class RoleInclusion:
    sub: Role
    sup: Role


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept  # C_L form: plain or T(C)
    individual: str

    def __post_init__(self):
        if self.concept.kind != TYP and not self.concept.is_typ_free():
            raise TypicalityError("T may only appear outermost in an assertion")


@dataclass(frozen=True)
class RoleAssertion:
    role: Role
    subject: str
    object: str

    def __post_init__(self):
        # inverted role assertions are normalized to the plain direction
        if self.role.inverted:
            object.__setattr__(self, "role", self.role.inverse())
            subj = self.subject
            object.__setattr__(self, "subject", self.object)
            object.__setattr__(self, "object", subj)


Assertion = Union[ConceptAssertion, RoleAssertion]
Axiom = Union[ConceptInclusion, RoleInclusion, Assertion]


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple[ConceptInclusion, ...] = ()
    rbox: RBox = field(default_factory=lambda: EMPTY_RBOX)
    abox: tuple[Assertion, ...] = ()
    individuals: tuple[str, ...] = ()
    universal_roles: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.individuals:
            object.__setattr__(self, "individuals", _declared_individuals(self.abox))
        for c in self.all_concepts():
            _check_simple_number_restrictions(c, self.rbox)

    def all_concepts(self) -> Iterator[Concept]:
        for inc in self.tbox:
            yield inc.lhs
            yield inc.rhs
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                yield a.concept

    def strict_tbox(self) -> tuple[ConceptInclusion, ...]:
        return tuple(i for i in self.tbox if not i.defeasible)

    def defeasible_tbox(self) -> tuple[ConceptInclusion, ...]:
        return tuple(i for i in self.tbox if i.defeasible)

    def is_typ_free(self) -> bool:
        return all(c.is_typ_free() for c in self.all_concepts())

    def role_inclusions(self) -> tuple[RoleInclusion, ...]:
        return tuple(
            RoleInclusion(sub, sup)
            for sub, sup in sorted(self.rbox.inclusions, key=lambda p: (p[0].key, p[1].key))
        )

    def axioms(self) -> tuple[Axiom, ...]:
        return tuple(self.tbox) + self.role_inclusions() + tuple(self.abox)

    def replace(self, **kw) -> "KnowledgeBase":
        data = {
            "tbox": self.tbox,
            "rbox": self.rbox,
            "abox": self.abox,
            "individuals": self.individuals if "abox" not in kw else (),
            "universal_roles": self.universal_roles,
        }
        data.update(kw)
        return KnowledgeBase(**data)


def _declared_individuals(abox: Iterable[Assertion]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for a in abox:
        if isinstance(a, ConceptAssertion):
            seen.setdefault(a.individual)
        else:
            seen.setdefault(a.subject)
            seen.setdefault(a.object)
    return tuple(seen)


def _check_simple_number_restrictions(c: Concept, rbox: RBox) -> None:
    stack = [c]
    while stack:
        d = stack.pop()
        if d.kind in (ATLEAST, ATMOST) and not rbox.is_simple(d.role):
            raise ValueError(f"transitive role in number restriction: {d.role.key}")
        stack.extend(d.args)


def split(kb: KnowledgeBase) -> tuple[tuple[Axiom, ...], tuple[ConceptInclusion, ...]]:
    """Partition KB into (K_F, K_D).

    K_F holds the typicality-free inclusions, the role inclusions and the
    ABox; K_D holds the typicality inclusions.  Together they are exactly
    the KB's axioms.
    """
    k_f: tuple[Axiom, ...] = kb.strict_tbox() + kb.role_inclusions() + tuple(kb.abox)
    k_d = kb.defeasible_tbox()
    return k_f, k_d


def _subexpressions(c: Concept, acc: dict[str, Concept]) -> None:
    if c.kind == TYP:
        _subexpressions(c.args[0], acc)
        return
    acc.setdefault(c.key, c)
    for a in c.args:
        _subexpressions(a, acc)


def subconcepts(kb: KnowledgeBase, extra: Iterable[Concept] = ()) -> tuple[Concept, ...]:
    """The set L_S: typicality-free subexpressions of the KB and the extras,
    closed under complement, deterministically ordered."""
    acc: dict[str, Concept] = {}
    for c in kb.all_concepts():
        _subexpressions(c, acc)
    for c in extra:
        _subexpressions(c, acc)
    for c in list(acc.values()):
        acc.setdefault(neg(c).key, neg(c))
    return tuple(sorted(acc.values(), key=lambda c: c.key))


def subconcept_count(kb: KnowledgeBase, extra: Iterable[Concept] = ()) -> int:
    """h_KB: the number of distinct subconcepts (without added complements)."""
    acc: dict[str, Concept] = {}
    for c in kb.all_concepts():
        _subexpressions(c, acc)
    for c in extra:
        _subexpressions(c, acc)
    return len(acc)
