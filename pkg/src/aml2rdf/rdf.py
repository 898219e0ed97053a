"""A small RDF multigraph with deterministic N-Triples and Turtle output."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
# Characters that may never appear raw inside an N-Triples IRIREF.
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class Iri(str):
    """Absolute IRI. A ``str`` subclass so it sorts and hashes like text."""

    __slots__ = ()

    def __new__(cls, value: str):
        if not _SCHEME.match(value):
            raise ValueError(f"not an absolute IRI: {value!r}")
        if _IRI_FORBIDDEN.search(value):
            raise ValueError(f"IRI contains characters that must be escaped: {value!r}")
        return super().__new__(cls, value)

    def __repr__(self) -> str:
        return f"Iri({str.__repr__(self)})"


class Namespace(str):
    """IRI prefix; ``ns["Name"]`` and ``ns.Name`` both build a term."""

    __slots__ = ()

    def term(self, local: str) -> Iri:
        return Iri(str(self) + local)

    def __getitem__(self, local):  # type: ignore[override]
        return self.term(local)

    def __getattr__(self, local: str) -> Iri:
        if local.startswith("__"):
            raise AttributeError(local)
        return self.term(local)


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")

RDF_TYPE = RDF.type
RDFS_LABEL = RDFS.label
RDFS_SUBCLASSOF = RDFS.subClassOf
OWL_CLASS = OWL.Class
XSD_STRING = XSD.string
RDF_LANGSTRING = RDF.langString


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: Iri = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self):
        if self.language is not None and self.datatype != RDF_LANGSTRING:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)


Term = Union[Iri, Literal]
Triple = tuple[Iri, Iri, Term]

# RFC 3987 iunreserved: ALPHA / DIGIT / "-" / "." / "_" / "~" / ucschar
_UCSCHAR = (
    (0xA0, 0xD7FF), (0xF900, 0xFDCF), (0xFDF0, 0xFFEF),
    (0x10000, 0x1FFFD), (0x20000, 0x2FFFD), (0x30000, 0x3FFFD),
    (0x40000, 0x4FFFD), (0x50000, 0x5FFFD), (0x60000, 0x6FFFD),
    (0x70000, 0x7FFFD), (0x80000, 0x8FFFD), (0x90000, 0x9FFFD),
    (0xA0000, 0xAFFFD), (0xB0000, 0xBFFFD), (0xC0000, 0xCFFFD),
    (0xD0000, 0xDFFFD), (0xE1000, 0xEFFFD),
)
_ASCII_UNRESERVED = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")
_HEX = frozenset("0123456789ABCDEFabcdef")


def _is_unreserved(ch: str) -> bool:
    if ch in _ASCII_UNRESERVED:
        return True
    cp = ord(ch)
    return cp >= 0xA0 and any(lo <= cp <= hi for lo, hi in _UCSCHAR)


def iri_safe(segment: str) -> str:
    """Percent-encode one path segment so it can be appended to an IRI.

    Existing ``%XX`` escapes are kept as they are, which makes the function
    idempotent.
    """
    if not segment:
        raise ValueError("cannot encode an empty segment")
    out = []
    i = 0
    while i < len(segment):
        ch = segment[i]
        if ch == "%" and i + 2 < len(segment) and segment[i + 1] in _HEX and segment[i + 2] in _HEX:
            out.append(segment[i:i + 3])
            i += 3
            continue
        if _is_unreserved(ch):
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8", "surrogatepass"))
        i += 1
    return "".join(out)


class Graph:
    """Set of triples indexed by subject and by (predicate, object)."""

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[dict[str, str]] = None):
        self._triples: set[Triple] = set()
        self._spo: dict[Iri, dict[Iri, set[Term]]] = defaultdict(lambda: defaultdict(set))
        self._pos: dict[Iri, dict[Term, set[Iri]]] = defaultdict(lambda: defaultdict(set))
        self.prefixes: dict[str, str] = dict(prefixes or {})
        for triple in triples:
            self.add(triple)

    def add(self, triple: Triple) -> bool:
        """Insert a triple; returns False if it was already present."""
        s, p, o = triple
        if not isinstance(s, Iri) or not isinstance(p, Iri) or not isinstance(o, (Iri, Literal)):
            raise TypeError(f"invalid triple {triple!r}")
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        return True

    def update(self, triples: Iterable[Triple]) -> set[Triple]:
        return {t for t in triples if self.add(t)}

    def __contains__(self, triple) -> bool:
        return triple in self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]

    def copy(self) -> Graph:
        return Graph(self._triples, self.prefixes)

    def objects(self, subject: Iri, predicate: Iri) -> set[Term]:
        by_p = self._spo.get(subject)
        if not by_p:
            return set()
        return set(by_p.get(predicate, ()))

    def subjects(self, predicate: Iri, obj: Term) -> set[Iri]:
        by_o = self._pos.get(predicate)
        if not by_o:
            return set()
        return set(by_o.get(obj, ()))

    def pairs(self, predicate: Iri) -> Iterator[tuple[Iri, Term]]:
        """All (subject, object) pairs connected by ``predicate``."""
        for obj, subjects in self._pos.get(predicate, {}).items():
            for s in subjects:
                yield s, obj

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        if s is not None and p is not None:
            for obj in self.objects(s, p):
                if o is None or o == obj:
                    yield (s, p, obj)
            return
        for triple in self._triples:
            if (s is None or triple[0] == s) and (p is None or triple[1] == p) and (o is None or triple[2] == o):
                yield triple

    def is_a(self, node: Term, cls: Iri) -> bool:
        return isinstance(node, Iri) and (node, RDF_TYPE, cls) in self._triples

    def instances(self, cls: Iri) -> set[Iri]:
        return self.subjects(RDF_TYPE, cls)

    def bind(self, prefix: str, namespace: str) -> None:
        self.prefixes[prefix] = str(namespace)


def insert(graph: Graph, triple: Triple) -> Graph:
    graph.add(triple)
    return graph


def contains(graph: Graph, triple: Triple) -> bool:
    return triple in graph


def objects_of(graph: Graph, subject: Iri, predicate: Iri) -> set[Term]:
    return graph.objects(subject, predicate)


def subjects_of(graph: Graph, predicate: Iri, obj: Term) -> set[Iri]:
    return graph.subjects(predicate, obj)


# -- serialization ---------------------------------------------------------

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def _escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def nt_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term}>"
    text = f'"{_escape_string(term.lexical)}"'
    if term.language:
        return f"{text}@{term.language}"
    if term.datatype == XSD_STRING:
        return text
    return f"{text}^^<{term.datatype}>"


def ntriples_lines(graph: Graph) -> list[str]:
    rows = sorted((nt_term(s), nt_term(p), nt_term(o)) for s, p, o in graph)
    return [f"{s} {p} {o} ." for s, p, o in rows]


def serialize_ntriples(graph: Graph) -> bytes:
    lines = ntriples_lines(graph)
    return "".join(line + "\n" for line in lines).encode("utf-8")


_PN_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
_PN_PREFIX = re.compile(r"^([A-Za-z][A-Za-z0-9_-]*)?$")


def _turtle_term(term: Term, prefixes: list[tuple[str, str]], predicate: bool = False) -> str:
    if isinstance(term, Iri):
        if predicate and term == RDF_TYPE:
            return "a"
        for prefix, ns in prefixes:
            if term.startswith(ns):
                local = term[len(ns):]
                if _PN_LOCAL.match(local):
                    return f"{prefix}:{local}"
        return f"<{term}>"
    return nt_term(term)


def serialize_turtle(graph: Graph) -> bytes:
    # Longest namespace first so the most specific prefix wins.
    prefixes = sorted(
        ((p, ns) for p, ns in graph.prefixes.items() if _PN_PREFIX.match(p)),
        key=lambda item: (-len(item[1]), item[0]),
    )
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes)]
    by_subject: dict[Iri, list[tuple[str, str]]] = defaultdict(list)
    for s, p, o in graph:
        by_subject[s].append((_turtle_term(p, prefixes, predicate=True), _turtle_term(o, prefixes)))
    if lines and by_subject:
        lines.append("")
    for subject in sorted(by_subject):
        entries = sorted(by_subject[subject], key=lambda e: (e[0] != "a", e))
        head = _turtle_term(subject, prefixes)
        body = []
        for i, (p, o) in enumerate(entries):
            sep = " ." if i == len(entries) - 1 else " ;"
            body.append(f"    {p} {o}{sep}")
        lines.append(head)
        lines.extend(body)
        lines.append("")
    return "".join(line + "\n" for line in lines).encode("utf-8")
