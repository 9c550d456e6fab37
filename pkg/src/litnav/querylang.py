"""Fielded boolean search-query language: parse, render, evaluate.

Canonical grammar (operators are case-sensitive uppercase, terms are
case-insensitive):

    query   = or ;
    or      = and { "OR" and } ;
    and     = not { "AND" not } ;
    not     = [ "NOT" ] atom ;
    atom    = field "=" "(" or ")" | "(" or ")" | phrase | word ;
    field   = "TS" | "TI" | "AB" | "AU" | "PY" ;
    phrase  = '"' text-without-quotes '"' ;
    word    = token [ "*" ] ;            PY atoms: year | year "-" year

The parser additionally accepts ``a NOT b`` as sugar for ``a AND NOT b``
(NOT stays unary in the AST); the renderer only ever emits the canonical
grammar above. Bare terms outside any field are evaluated in TS scope
(title, abstract, keywords) and are wrapped in an explicit ``TS=(...)``
by the renderer.

Matching tokenizes text on non-alphanumeric boundaries and lowercases; a
trailing ``*`` on a word is a prefix wildcard over whole tokens; phrases
match a contiguous token run inside a single text (a title, the abstract,
one keyword, or one author name).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Optional, Union

if TYPE_CHECKING:
    from .corpus import CorpusStore, MetadataRecord


class FieldTag(str, Enum):
    TS = "TS"  # topic: title + abstract + keywords
    TI = "TI"  # title
    AB = "AB"  # abstract
    AU = "AU"  # author (canonical names)
    PY = "PY"  # publication year


class ParseError(ValueError):
    """Syntax failure with the byte offset and the tokens expected there."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


@dataclass(frozen=True)
class Word:
    text: str
    wildcard: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("word text must be non-empty")
        if "*" in self.text:
            raise ValueError("wildcard is modeled by the flag, not by '*' in text")


@dataclass(frozen=True)
class Phrase:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("phrase text must be non-empty")
        if '"' in self.text:
            raise ValueError("phrase text may not contain quotes")


@dataclass(frozen=True)
class YearRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"year range {self.lo}-{self.hi} is reversed")


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("AND needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("OR needs at least two children")


@dataclass(frozen=True)
class Field:
    tag: FieldTag
    child: "Node"

    def __post_init__(self):
        if isinstance(self.child, Field) and self.child.tag == self.tag:
            raise ValueError(f"field {self.tag.value} directly nests the same tag")


Node = Union[Word, Phrase, YearRange, Not, And, Or, Field]

_FIELD_TAGS = {t.value for t in FieldTag}
_KEYWORDS = {"AND", "OR", "NOT"}
_TERM_BREAK = set('()"=') | set(" \t\r\n")
_YEAR_RE = re.compile(r"^(\d{1,4})(?:-(\d{1,4}))?$")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize_text(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, the shared tokenization for matching."""
    return _TOKEN_RE.findall(text.lower())


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class _Tok:
    kind: str  # one of ( ) FIELD AND OR NOT TERM PHRASE EOF
    value: str
    offset: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        off = _byte_offset(text, i)
        if ch in "()":
            toks.append(_Tok(ch, ch, off))
            i += 1
            continue
        if ch == "=":
            raise ParseError("stray '='", off, ("term",))
        if ch == '"':
            end = text.find('"', i + 1)
            if end < 0:
                raise ParseError("unterminated phrase", off, ('"',))
            toks.append(_Tok("PHRASE", text[i + 1 : end], off))
            i = end + 1
            continue
        j = i
        while j < n and text[j] not in _TERM_BREAK:
            j += 1
        term = text[i:j]
        if j < n and text[j] == "=":
            if term in _FIELD_TAGS:
                toks.append(_Tok("FIELD", term, off))
                i = j + 1
                continue
            raise ParseError(f"unknown field tag {term!r}", off, tuple(sorted(_FIELD_TAGS)))
        if term in _KEYWORDS:
            toks.append(_Tok(term, term, off))
        else:
            toks.append(_Tok("TERM", term, off))
        i = j
    toks.append(_Tok("EOF", "", _byte_offset(text, n)))
    return toks


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Node:
        node = self.parse_or(in_py=False)
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(f"unexpected {tok.value!r}", tok.offset, ("AND", "OR", "end of query"))
        return node

    def parse_or(self, in_py: bool) -> Node:
        children = [self.parse_and(in_py)]
        while self.peek().kind == "OR":
            self.take()
            children.append(self.parse_and(in_py))
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_and(self, in_py: bool) -> Node:
        children = [self.parse_not(in_py)]
        while True:
            kind = self.peek().kind
            if kind == "AND":
                self.take()
                children.append(self.parse_not(in_py))
            elif kind == "NOT":
                # binary-NOT sugar: a NOT b == a AND NOT b
                self.take()
                children.append(Not(self.parse_atom(in_py)))
            else:
                break
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_not(self, in_py: bool) -> Node:
        if self.peek().kind == "NOT":
            self.take()
            return Not(self.parse_atom(in_py))
        return self.parse_atom(in_py)

    def parse_atom(self, in_py: bool) -> Node:
        tok = self.peek()
        if tok.kind == "FIELD":
            self.take()
            tag = FieldTag(tok.value)
            if in_py:
                raise ParseError("field not allowed inside PY", tok.offset, ("year",))
            opener = self.take()
            if opener.kind != "(":
                raise ParseError("field tag must be followed by '('", opener.offset, ("(",))
            body = self.parse_or(in_py=(tag is FieldTag.PY))
            self.expect_close()
            if isinstance(body, Field) and body.tag == tag:
                raise ParseError(
                    f"field {tag.value} directly nests the same tag", tok.offset, ("term",)
                )
            return Field(tag, body)
        if tok.kind == "(":
            self.take()
            if self.peek().kind == ")":
                raise ParseError("empty group", self.peek().offset, ("term",))
            body = self.parse_or(in_py)
            self.expect_close()
            return body
        if tok.kind == "PHRASE":
            self.take()
            if in_py:
                raise ParseError("malformed year range", tok.offset, ("year",))
            if not tok.value.strip():
                raise ParseError("empty phrase", tok.offset, ("text",))
            # inner whitespace is not significant to phrase matching, so the
            # canonical AST stores the single-spaced form
            return Phrase(" ".join(tok.value.split()))
        if tok.kind == "TERM":
            self.take()
            if in_py:
                m = _YEAR_RE.match(tok.value)
                if not m:
                    raise ParseError("malformed year range", tok.offset, ("year", "year-year"))
                lo = int(m.group(1))
                hi = int(m.group(2)) if m.group(2) else lo
                if lo > hi:
                    raise ParseError("malformed year range", tok.offset, ("lo <= hi",))
                return YearRange(lo, hi)
            text = tok.value
            wildcard = text.endswith("*")
            if wildcard:
                text = text[:-1]
            if "*" in text:
                raise ParseError("wildcard '*' only allowed at the end of a word", tok.offset)
            if not text:
                raise ParseError("empty term", tok.offset, ("term",))
            return Word(text, wildcard)
        raise ParseError(
            f"expected term, got {tok.value!r}" if tok.kind != "EOF" else "expected term",
            tok.offset,
            ("term", "phrase", "(", "field"),
        )

    def expect_close(self):
        tok = self.take()
        if tok.kind != ")":
            raise ParseError("unbalanced parentheses", tok.offset, (")",))


def parse_query(text: str) -> Node:
    """Parse query text to an AST. Raises :class:`ParseError` with offset."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Validation and canonicalization


def validate_ast(node: Node, in_field: Optional[FieldTag] = None) -> None:
    """Enforce the structural invariants the constructors cannot see.

    YearRange only under PY, and PY bodies built from year atoms only.
    """
    if isinstance(node, YearRange):
        if in_field is not FieldTag.PY:
            raise ValueError("year range outside a PY field")
    elif isinstance(node, (Word, Phrase)):
        if in_field is FieldTag.PY:
            raise ValueError("PY fields admit only year atoms")
    elif isinstance(node, Not):
        validate_ast(node.child, in_field)
    elif isinstance(node, (And, Or)):
        for child in node.children:
            validate_ast(child, in_field)
    elif isinstance(node, Field):
        if in_field is FieldTag.PY:
            raise ValueError("PY fields admit only year atoms")
        validate_ast(node.child, node.tag)
    else:
        raise TypeError(f"not a query node: {node!r}")


def _has_field(node: Node) -> bool:
    if isinstance(node, Field):
        return True
    if isinstance(node, Not):
        return _has_field(node.child)
    if isinstance(node, (And, Or)):
        return any(_has_field(c) for c in node.children)
    return False


def apply_ts_default(node: Node) -> Node:
    """Wrap maximal field-free subtrees in explicit TS fields.

    This is the normalization under which parse(render(q)) equals q: the
    renderer emits no bare terms, so a bare subtree acquires exactly one
    enclosing ``TS=(...)``.
    """
    if isinstance(node, Field):
        return node
    if not _has_field(node):
        return Field(FieldTag.TS, node)
    if isinstance(node, Not):
        return Not(apply_ts_default(node.child))
    if isinstance(node, And):
        return And(tuple(apply_ts_default(c) for c in node.children))
    if isinstance(node, Or):
        return Or(tuple(apply_ts_default(c) for c in node.children))
    return node


def _render_inner(node: Node) -> str:
    if isinstance(node, Word):
        return node.text + ("*" if node.wildcard else "")
    if isinstance(node, Phrase):
        return f'"{node.text}"'
    if isinstance(node, YearRange):
        return str(node.lo) if node.lo == node.hi else f"{node.lo}-{node.hi}"
    if isinstance(node, Field):
        return f"{node.tag.value}=({_render_inner(node.child)})"
    if isinstance(node, Not):
        child = node.child
        body = _render_inner(child)
        if isinstance(child, (And, Or, Not)):
            body = f"({body})"
        return f"NOT {body}"
    if isinstance(node, And):
        parts = []
        for child in node.children:
            body = _render_inner(child)
            if isinstance(child, (And, Or)):
                body = f"({body})"
            parts.append(body)
        return " AND ".join(parts)
    if isinstance(node, Or):
        parts = []
        for child in node.children:
            body = _render_inner(child)
            if isinstance(child, Or):
                body = f"({body})"
            parts.append(body)
        return " OR ".join(parts)
    raise TypeError(f"not a query node: {node!r}")


def render_query(node: Node) -> str:
    """Render the canonical wire form: explicit fields, uppercase operators,
    minimal parentheses consistent with precedence and structure."""
    validate_ast(node)
    return _render_inner(apply_ts_default(node))


# ---------------------------------------------------------------------------
# Evaluation


def _scope_texts(record: "MetadataRecord", tag: FieldTag) -> list[str]:
    if tag is FieldTag.TS:
        return [record.title, record.abstract, *record.keywords]
    if tag is FieldTag.TI:
        return [record.title]
    if tag is FieldTag.AB:
        return [record.abstract]
    if tag is FieldTag.AU:
        return [a.canonical_name for a in record.authors]
    raise ValueError(f"no text scope for {tag}")


def _contains_run(haystack: list[str], needle: list[str]) -> bool:
    if not needle:
        return False
    n = len(needle)
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def matches(node: Node, record: "MetadataRecord", scope: FieldTag = FieldTag.TS) -> bool:
    """Evaluate a query AST against one record.

    ``scope`` is the field context for bare terms (TS unless inside a Field).
    """
    if isinstance(node, And):
        return all(matches(c, record, scope) for c in node.children)
    if isinstance(node, Or):
        return any(matches(c, record, scope) for c in node.children)
    if isinstance(node, Not):
        return not matches(node.child, record, scope)
    if isinstance(node, Field):
        return matches(node.child, record, node.tag)
    if isinstance(node, YearRange):
        return node.lo <= record.year <= node.hi
    if isinstance(node, Word):
        text = node.text.lower()
        for hay in _scope_texts(record, scope):
            toks = tokenize_text(hay)
            if node.wildcard:
                if any(t.startswith(text) for t in toks):
                    return True
            elif text in toks:
                return True
        return False
    if isinstance(node, Phrase):
        needle = tokenize_text(node.text)
        return any(
            _contains_run(tokenize_text(hay), needle) for hay in _scope_texts(record, scope)
        )
    raise TypeError(f"not a query node: {node!r}")


def search(node: Node, store: "CorpusStore") -> list[str]:
    """All matching uids, ordered by year descending then uid ascending."""
    hits = [uid for uid, rec in store.records.items() if matches(node, rec)]
    hits.sort(key=lambda uid: (-store.records[uid].year, uid))
    return hits


class LocalCorpusClient:
    """Reference ScholarlyDatabaseClient: linear scan over a local store."""

    def __init__(self, store: "CorpusStore"):
        self.store = store

    def search(self, query: Node) -> list["MetadataRecord"]:
        return [self.store.records[uid] for uid in search(query, self.store)]

    def name(self) -> str:
        return f"local-corpus({len(self.store.records)} records)"
