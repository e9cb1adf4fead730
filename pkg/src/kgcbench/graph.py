"""In-memory triple store with indexed traversal and N-Triples I/O.

The store keeps entity-to-entity triples only (no literals, no blank
nodes): every benchmark graph handled by this package relates URIs to
URIs, and entity types are encoded as ordinary triples through a
designated type predicate.  Forward and inverse adjacency indices are
maintained on every insert so that outgoing and ingoing neighbourhood
lookups are O(1) dictionary hops.

Serialization is deliberately minimal: one triple per line, IRI terms
only, lines sorted lexicographically so that the same graph always
produces byte-identical output.  This keeps versioned gold-standard
files diffable and hashable.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Set, TextIO, Union

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


class _Wildcard:
    """Sentinel for 'any relation' in successor/predecessor queries."""

    def __repr__(self) -> str:  # pragma: no cover
        return "ANY"


ANY = _Wildcard()

RelationArg = Union[str, _Wildcard]


class UriError(ValueError):
    """Raised when a string is not usable as a graph term."""


class NTriplesError(ValueError):
    """Raised on malformed or unsupported N-Triples input."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def validate_uri(value: str) -> str:
    """Check that ``value`` can serve as a subject, relation or object.

    Terms must be non-empty strings without whitespace or control
    characters; anything else cannot round-trip through the N-Triples
    writer unambiguously.
    """
    if not isinstance(value, str):
        raise UriError(f"URI must be a string, got {type(value).__name__}")
    if not value:
        raise UriError("URI must be non-empty")
    for ch in value:
        if ch.isspace() or ord(ch) < 0x21:
            raise UriError(f"URI contains whitespace or control character: {value!r}")
    return value


@dataclass(frozen=True)
class Triple:
    """A single (subject, relation, object) edge between two entities."""

    subject: str
    relation: str
    object: str

    def __post_init__(self) -> None:
        validate_uri(self.subject)
        validate_uri(self.relation)
        validate_uri(self.object)

    def __iter__(self) -> Iterator[str]:
        yield self.subject
        yield self.relation
        yield self.object


class KnowledgeGraph:
    """A duplicate-free set of triples with forward and inverse indices.

    The graph is mutable while it is being built (single owner) and is
    treated as immutable afterwards; all read operations are side-effect
    free.  ``type_relation`` names the predicate whose triples encode
    entity types; it is an ordinary relation in every other respect.
    """

    def __init__(self, type_relation: str = RDF_TYPE) -> None:
        self.type_relation = validate_uri(type_relation)
        self._triples: Set[Triple] = set()
        self._fwd: Dict[str, Dict[str, Set[str]]] = {}
        self._inv: Dict[str, Dict[str, Set[str]]] = {}

    # -- construction -------------------------------------------------

    def add(self, subject: str, relation: str, object: str) -> None:
        """Insert one triple; duplicates are ignored."""
        self.add_triple(Triple(subject, relation, object))

    def add_triple(self, triple: Triple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._fwd.setdefault(triple.subject, {}).setdefault(triple.relation, set()).add(
            triple.object
        )
        self._inv.setdefault(triple.object, {}).setdefault(triple.relation, set()).add(
            triple.subject
        )

    def discard(self, subject: str, relation: str, object: str) -> None:
        """Remove one triple if present, keeping both indices exact.

        Only intended for the construction phase (tentative edges that
        turn out to violate a generation constraint are rolled back).
        """
        triple = Triple(subject, relation, object)
        if triple not in self._triples:
            return
        self._triples.remove(triple)
        for index, key, member in (
            (self._fwd, subject, object),
            (self._inv, object, subject),
        ):
            bucket = index[key][relation]
            bucket.remove(member)
            if not bucket:
                del index[key][relation]
            if not index[key]:
                del index[key]

    # -- queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def has(self, subject: str, relation: str, object: str) -> bool:
        return Triple(subject, relation, object) in self._triples

    def triples(self) -> Iterator[Triple]:
        return iter(self._triples)

    def successors(self, entity: str, relation: RelationArg = ANY) -> Set[str]:
        """All objects o with (entity, relation, o) in the graph.

        Passing ``ANY`` unions over every relation.  Unknown entities
        yield the empty set.
        """
        by_relation = self._fwd.get(entity)
        if by_relation is None:
            return set()
        if isinstance(relation, _Wildcard):
            result: Set[str] = set()
            for objects in by_relation.values():
                result |= objects
            return result
        return set(by_relation.get(relation, ()))

    def predecessors(self, entity: str, relation: RelationArg = ANY) -> Set[str]:
        """All subjects s with (s, relation, entity) in the graph."""
        by_relation = self._inv.get(entity)
        if by_relation is None:
            return set()
        if isinstance(relation, _Wildcard):
            result: Set[str] = set()
            for subjects in by_relation.values():
                result |= subjects
            return result
        return set(by_relation.get(relation, ()))

    def out_degree(self, entity: str, relation: RelationArg = ANY) -> int:
        return len(self.successors(entity, relation))

    def entities(self) -> Set[str]:
        """Every URI that occurs in subject or object position."""
        return set(self._fwd) | set(self._inv)

    def relations(self) -> Set[str]:
        result: Set[str] = set()
        for by_relation in self._fwd.values():
            result.update(by_relation)
        return result

    def types_of(self, entity: str) -> Set[str]:
        return self.successors(entity, self.type_relation)


# -- N-Triples serialization ------------------------------------------

# Characters that may not appear raw inside an IRIREF term.
_IRI_ESCAPE = {ch: "\\u%04X" % ord(ch) for ch in '<>"{}|^`\\'}
_IRI_ESCAPE.update({chr(code): "\\u%04X" % code for code in range(0x21)})

_UCHAR_RE = re.compile(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})")
_LINE_RE = re.compile(r"^<([^<>]*)>\s+<([^<>]*)>\s+<([^<>]*)>\s*\.$")


def _escape_iri(value: str) -> str:
    if any(ch in _IRI_ESCAPE for ch in value):
        return "".join(_IRI_ESCAPE.get(ch, ch) for ch in value)
    return value


def _unescape_iri(value: str) -> str:
    def replace(match: re.Match) -> str:
        hex_digits = match.group(1) or match.group(2)
        return chr(int(hex_digits, 16))

    return _UCHAR_RE.sub(replace, value)


def format_triple(triple: Triple) -> str:
    """Render one triple as a single N-Triples line (without newline)."""
    return "<%s> <%s> <%s> ." % (
        _escape_iri(triple.subject),
        _escape_iri(triple.relation),
        _escape_iri(triple.object),
    )


def write_ntriples(graph: KnowledgeGraph, sink: TextIO) -> None:
    """Write all triples, one per line, sorted for byte-determinism."""
    lines = sorted(format_triple(t) for t in graph.triples())
    for line in lines:
        sink.write(line)
        sink.write("\n")


def dumps_ntriples(graph: KnowledgeGraph) -> str:
    buffer = io.StringIO()
    write_ntriples(graph, buffer)
    return buffer.getvalue()


def parse_ntriples(
    source: Union[TextIO, Iterable[str]], type_relation: str = RDF_TYPE
) -> KnowledgeGraph:
    """Parse line-oriented N-Triples restricted to IRI terms.

    Comments (``#`` at line start) and blank lines are skipped.  Literal
    or blank-node terms are rejected rather than skipped so that bad
    inputs surface immediately.
    """
    graph = KnowledgeGraph(type_relation=type_relation)
    for line_number, raw_line in enumerate(source, start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        match = _LINE_RE.match(line)
        if match is None:
            if '"' in line:
                raise NTriplesError(line_number, "literal terms are unsupported")
            if "_:" in line:
                raise NTriplesError(line_number, "blank-node terms are unsupported")
            raise NTriplesError(line_number, f"malformed triple line: {line!r}")
        terms = [_unescape_iri(group) for group in match.groups()]
        try:
            graph.add(terms[0], terms[1], terms[2])
        except UriError as exc:
            raise NTriplesError(line_number, str(exc)) from exc
    return graph


def load_ntriples(path: str, type_relation: str = RDF_TYPE) -> KnowledgeGraph:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_ntriples(handle, type_relation=type_relation)


def save_ntriples(graph: KnowledgeGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        write_ntriples(graph, handle)
