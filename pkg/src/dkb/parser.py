"""Line-oriented text format for knowledge bases and queries (.dkb files).

Statements, one per line ('#' starts a comment):

    role R            role R <= S       trans R
    C <= D            T(C) <= D
    a : C             a : T(C)          (a, b) : R

Concepts:

    top | bot | NAME | not C | C and D | C or D
    some R . C | only R . C | atleast N R . C | atmost N R . C | inv(R)

with precedence not > and > or.  Quantifiers bind their filler tightly:
`some R . A and B` reads `(some R . A) and B`.  A query is a statement-like
line with a trailing `?`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from . import model as m


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    length: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span.line}:{span.column}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class SubsumptionQuery:
    lhs: m.Concept  # may be T(C)
    rhs: m.Concept


@dataclass(frozen=True)
class AssertionQuery:
    individual: str
    concept: m.Concept  # may be T(C)


@dataclass(frozen=True)
class SatQuery:
    concept: m.Concept  # may be T(C)


Query = Union[SubsumptionQuery, AssertionQuery, SatQuery]

KEYWORDS = {
    "role", "trans", "top", "bot", "not", "and", "or",
    "some", "only", "atleast", "atmost", "inv", "T", "sat",
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)|(?P<op><=|\(|\)|,|:|\.|\?)|(?P<bad>\S))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'name' | 'num' | an operator literal | 'eol'
    text: str
    span: SourceSpan


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    body = line.split("#", 1)[0]
    while pos < len(body):
        mo = _TOKEN_RE.match(body, pos)
        if mo is None or mo.end() == pos:
            break
        pos = mo.end()
        span = SourceSpan(lineno, mo.start(mo.lastgroup) + 1, len(mo.group(mo.lastgroup)))
        if mo.group("name"):
            toks.append(_Tok("name", mo.group("name"), span))
        elif mo.group("num"):
            toks.append(_Tok("num", mo.group("num"), span))
        elif mo.group("op"):
            toks.append(_Tok(mo.group("op"), mo.group("op"), span))
        else:
            raise ParseError(f"unexpected character {mo.group('bad')!r}", span)
    toks.append(_Tok("eol", "", SourceSpan(lineno, len(body) + 1, 1)))
    return toks


class _LineParser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eol":
            self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or 'end of line'!r}", t.span)
        return self.next()

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "name" and t.text == word

    def take_keyword(self, word: str) -> bool:
        if self.at_keyword(word):
            self.next()
            return True
        return False

    # -- roles --------------------------------------------------------------

    def parse_role(self) -> m.Role:
        if self.take_keyword("inv"):
            self.expect("(")
            t = self.name_token("role name")
            self.expect(")")
            return m.Role(t.text, True)
        t = self.name_token("role name")
        return m.Role(t.text)

    def name_token(self, what: str) -> _Tok:
        t = self.peek()
        if t.kind != "name":
            raise ParseError(f"expected {what}, found {t.text or 'end of line'!r}", t.span)
        if t.text in KEYWORDS and t.text != "T":
            raise ParseError(f"keyword {t.text!r} cannot be used as {what}", t.span)
        return self.next()

    # -- concepts -----------------------------------------------------------

    def parse_concept(self) -> m.Concept:
        return self._or()

    def _or(self) -> m.Concept:
        c = self._and()
        while self.take_keyword("or"):
            c = m.disj(c, self._and())
        return c

    def _and(self) -> m.Concept:
        c = self._unary()
        while self.take_keyword("and"):
            c = m.conj(c, self._unary())
        return c

    def _unary(self) -> m.Concept:
        t = self.peek()
        if self.take_keyword("not"):
            return m.neg(self._unary())
        if self.take_keyword("some"):
            role = self.parse_role()
            self.expect(".")
            return m.some(role, self._unary())
        if self.take_keyword("only"):
            role = self.parse_role()
            self.expect(".")
            return m.only(role, self._unary())
        if self.take_keyword("atleast"):
            n = int(self.expect("num").text)
            role = self.parse_role()
            self.expect(".")
            self._note_restriction(role, t.span)
            return m.at_least(n, role, self._unary())
        if self.take_keyword("atmost"):
            n = int(self.expect("num").text)
            role = self.parse_role()
            self.expect(".")
            self._note_restriction(role, t.span)
            return m.at_most(n, role, self._unary())
        return self._primary()

    def _primary(self) -> m.Concept:
        t = self.peek()
        if t.kind == "(":
            self.next()
            c = self._or()
            self.expect(")")
            return c
        if self.take_keyword("top"):
            return m.top
        if self.take_keyword("bot"):
            return m.bot
        if t.kind == "name" and t.text == "T":
            raise ParseError("typicality is not allowed here", t.span)
        name = self.name_token("concept name")
        return m.atom(name.text)

    def parse_concept_l(self) -> m.Concept:
        """C_L form: a plain concept or a single outermost T(...)."""
        t = self.peek()
        if t.kind == "name" and t.text == "T":
            self.next()
            self.expect("(")
            inner_tok = self.peek()
            if inner_tok.kind == "name" and inner_tok.text == "T":
                raise ParseError("nested typicality", inner_tok.span)
            c = self.parse_concept()
            self.expect(")")
            try:
                return m.typ(c)
            except m.TypicalityError:
                raise ParseError("nested typicality", inner_tok.span)
        return self.parse_concept()

    def _note_restriction(self, role: m.Role, span: SourceSpan) -> None:
        self.restrictions.append((role, span))

    restrictions: list


Statement = Union[
    m.ConceptInclusion, m.RoleInclusion, m.ConceptAssertion, m.RoleAssertion,
    tuple,  # ('trans', name) | ('role', name)
]


def _parse_statement(p: _LineParser) -> Optional[Statement]:
    t = p.peek()
    if t.kind == "eol":
        return None
    if p.take_keyword("trans"):
        name = p.name_token("role name")
        p.expect("eol")
        return ("trans", name.text)
    if p.take_keyword("role"):
        sub = p.parse_role()
        if p.peek().kind == "<=":
            p.next()
            sup = p.parse_role()
            p.expect("eol")
            return m.RoleInclusion(sub, sup)
        p.expect("eol")
        return ("role", sub.name)
    if t.kind == "(":
        # (a, b) : R
        p.next()
        a = p.name_token("individual")
        p.expect(",")
        b = p.name_token("individual")
        p.expect(")")
        p.expect(":")
        role = p.parse_role()
        p.expect("eol")
        return m.RoleAssertion(role, a.text, b.text)
    # lookahead for `a : C`
    if t.kind == "name" and t.text not in KEYWORDS and p.toks[p.i + 1].kind == ":":
        a = p.name_token("individual")
        p.expect(":")
        c = p.parse_concept_l()
        p.expect("eol")
        return m.ConceptAssertion(c, a.text)
    lhs = p.parse_concept_l()
    op = p.peek()
    if op.kind != "<=":
        raise ParseError(f"expected '<=', found {op.text or 'end of line'!r}", op.span)
    p.next()
    rhs_tok = p.peek()
    if rhs_tok.kind == "name" and rhs_tok.text == "T":
        raise ParseError("T on right-hand side", rhs_tok.span)
    rhs = p.parse_concept()
    p.expect("eol")
    return m.ConceptInclusion(lhs, rhs)


def parse_kb(text: str) -> m.KnowledgeBase:
    tbox: list[m.ConceptInclusion] = []
    abox: list[m.Assertion] = []
    inclusions: list[tuple[m.Role, m.Role]] = []
    transitive: list[str] = []
    restrictions: list[tuple[m.Role, SourceSpan]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        p = _LineParser(_tokenize(line, lineno))
        p.restrictions = []
        stmt = _parse_statement(p)
        restrictions.extend(p.restrictions)
        if stmt is None:
            continue
        if isinstance(stmt, m.ConceptInclusion):
            tbox.append(stmt)
        elif isinstance(stmt, m.RoleInclusion):
            inclusions.append((stmt.sub, stmt.sup))
        elif isinstance(stmt, (m.ConceptAssertion, m.RoleAssertion)):
            abox.append(stmt)
        elif stmt[0] == "trans":
            transitive.append(stmt[1])
        # bare `role R` declarations carry no content
    rbox = m.RBox(inclusions, transitive)
    for role, span in restrictions:
        if not rbox.is_simple(role):
            raise ParseError(f"transitive role in number restriction: {role.key}", span)
    return m.KnowledgeBase(tbox=tuple(tbox), rbox=rbox, abox=tuple(abox))


def parse_query(text: str, rbox: Optional[m.RBox] = None) -> Query:
    lines = [ln for ln in text.splitlines() if ln.split("#", 1)[0].strip()]
    if len(lines) != 1:
        span = SourceSpan(1, 1, max(1, len(text)))
        raise ParseError("expected exactly one query", span)
    lineno = text.splitlines().index(lines[0]) + 1
    toks = _tokenize(lines[0], lineno)
    if len(toks) < 2 or toks[-2].kind != "?":
        raise ParseError("query must end with '?'", toks[-1].span)
    toks = toks[:-2] + [toks[-1]]
    p = _LineParser(toks)
    p.restrictions = []
    if p.take_keyword("sat"):
        c = p.parse_concept_l()
        p.expect("eol")
        query: Query = SatQuery(c)
    else:
        t = p.peek()
        if t.kind == "name" and t.text not in KEYWORDS and p.toks[p.i + 1].kind == ":":
            a = p.name_token("individual")
            p.expect(":")
            c = p.parse_concept_l()
            p.expect("eol")
            query = AssertionQuery(a.text, c)
        else:
            lhs = p.parse_concept_l()
            op = p.peek()
            if op.kind != "<=":
                raise ParseError(f"expected '<=', found {op.text or 'end of line'!r}", op.span)
            p.next()
            rhs_tok = p.peek()
            if rhs_tok.kind == "name" and rhs_tok.text == "T":
                raise ParseError("T on right-hand side", rhs_tok.span)
            rhs = p.parse_concept()
            p.expect("eol")
            query = SubsumptionQuery(lhs, rhs)
    if rbox is not None:
        for role, span in p.restrictions:
            if not rbox.is_simple(role):
                raise ParseError(f"transitive role in number restriction: {role.key}", span)
    return query


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC_OR = 0
_PREC_AND = 1
_PREC_UNARY = 2


def print_role(r: m.Role) -> str:
    return f"inv({r.name})" if r.inverted else r.name


def print_concept(c: m.Concept) -> str:
    return _pc(c, _PREC_OR)


def _pc(c: m.Concept, ctx: int) -> str:
    if c.kind == m.TOP:
        return "top"
    if c.kind == m.BOT:
        return "bot"
    if c.kind == m.ATOM:
        return c.name
    if c.kind == m.TYP:
        return f"T({_pc(c.args[0], _PREC_OR)})"
    if c.kind == m.NOT:
        return f"not {_pc(c.args[0], _PREC_UNARY)}"
    if c.kind == m.AND:
        s = " and ".join(_pc(a, _PREC_UNARY) for a in c.args)
        return f"({s})" if ctx > _PREC_AND else s
    if c.kind == m.OR:
        s = " or ".join(_pc(a, _PREC_AND) for a in c.args)
        return f"({s})" if ctx > _PREC_OR else s
    if c.kind == m.SOME:
        return f"some {print_role(c.role)} . {_pc(c.args[0], _PREC_UNARY)}"
    if c.kind == m.ONLY:
        return f"only {print_role(c.role)} . {_pc(c.args[0], _PREC_UNARY)}"
    if c.kind == m.ATLEAST:
        return f"atleast {c.num} {print_role(c.role)} . {_pc(c.args[0], _PREC_UNARY)}"
    if c.kind == m.ATMOST:
        return f"atmost {c.num} {print_role(c.role)} . {_pc(c.args[0], _PREC_UNARY)}"
    raise ValueError(c.kind)  # pragma: no cover


def print_kb(kb: m.KnowledgeBase) -> str:
    lines: list[str] = []
    for name in sorted(kb.rbox.transitive):
        lines.append(f"trans {name}")
    for inc in kb.role_inclusions():
        lines.append(f"role {print_role(inc.sub)} <= {print_role(inc.sup)}")
    for inc in kb.tbox:
        lines.append(f"{print_concept(inc.lhs)} <= {print_concept(inc.rhs)}")
    for a in kb.abox:
        if isinstance(a, m.ConceptAssertion):
            lines.append(f"{a.individual} : {print_concept(a.concept)}")
        else:
            lines.append(f"({a.subject}, {a.object}) : {print_role(a.role)}")
    return "\n".join(lines) + ("\n" if lines else "")


def print_query(q: Query) -> str:
    if isinstance(q, SubsumptionQuery):
        return f"{print_concept(q.lhs)} <= {print_concept(q.rhs)} ?"
    if isinstance(q, AssertionQuery):
        return f"{q.individual} : {print_concept(q.concept)} ?"
    return f"sat {print_concept(q.concept)} ?"
