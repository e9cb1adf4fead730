"""Triple store: insertion, adjacency, and N-Triples round-trips."""

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgcbench.graph import (
    ANY,
    KnowledgeGraph,
    NTriplesError,
    Triple,
    UriError,
    dumps_ntriples,
    format_triple,
    parse_ntriples,
)


def ex(name: str) -> str:
    return f"http://example.org/{name}"


def build(*triples) -> KnowledgeGraph:
    graph = KnowledgeGraph()
    for s, r, o in triples:
        graph.add(ex(s), ex(r), ex(o))
    return graph


# -- insertion and adjacency -----------------------------------------


def test_single_insertion():
    graph = build(("a", "r", "b"))
    assert len(graph) == 1
    assert graph.successors(ex("a"), ex("r")) == {ex("b")}
    assert graph.predecessors(ex("b"), ex("r")) == {ex("a")}


def test_duplicate_insert_is_idempotent():
    graph = build(("a", "r", "b"), ("a", "r", "b"))
    assert len(graph) == 1


def test_multi_object_adjacency():
    graph = build(("a", "r", "b"), ("a", "r", "c"))
    assert graph.successors(ex("a"), ex("r")) == {ex("b"), ex("c")}


def test_successors_direction_matters():
    graph = build(("a", "r", "b"))
    assert graph.successors(ex("b"), ex("r")) == set()
    assert graph.predecessors(ex("a"), ex("r")) == set()


def test_wildcard_unions_over_relations():
    graph = build(("a", "r", "b"), ("a", "s", "c"))
    assert graph.successors(ex("a"), ANY) == {ex("b"), ex("c")}


def test_predecessors_multiple_subjects():
    graph = build(("a", "r", "b"), ("c", "r", "b"))
    assert graph.predecessors(ex("b"), ex("r")) == {ex("a"), ex("c")}


def test_absent_entity_yields_empty_set():
    graph = build(("a", "r", "b"))
    assert graph.successors(ex("nobody"), ANY) == set()
    assert graph.predecessors(ex("nobody"), ANY) == set()


def test_entities_are_subjects_and_objects():
    graph = build(("a", "r", "b"), ("b", "s", "c"))
    assert graph.entities() == {ex("a"), ex("b"), ex("c")}
    assert graph.relations() == {ex("r"), ex("s")}


def test_discard_restores_previous_state():
    graph = build(("a", "r", "b"), ("a", "r", "c"))
    graph.discard(ex("a"), ex("r"), ex("c"))
    assert len(graph) == 1
    assert graph.successors(ex("a"), ex("r")) == {ex("b")}
    assert graph.predecessors(ex("c"), ex("r")) == set()
    # entities() must not keep ghosts of fully removed nodes
    assert ex("c") not in graph.entities()
    graph.discard(ex("a"), ex("r"), ex("c"))  # no-op on absent triple
    assert len(graph) == 1


def test_uri_validation_rejects_bad_terms():
    with pytest.raises(UriError):
        Triple("", ex("r"), ex("b"))
    with pytest.raises(UriError):
        Triple("http://e/a b", ex("r"), ex("b"))
    with pytest.raises(UriError):
        Triple(ex("a"), "has\ttab", ex("b"))


# -- serialization ----------------------------------------------------


def test_single_triple_line_format():
    graph = build(("a", "r", "b"))
    assert dumps_ntriples(graph) == (
        "<http://example.org/a> <http://example.org/r> <http://example.org/b> .\n"
    )


def test_write_is_sorted_and_deterministic():
    g1 = build(("b", "r", "a"), ("a", "r", "b"))
    g2 = build(("a", "r", "b"), ("b", "r", "a"))
    text = dumps_ntriples(g1)
    assert text == dumps_ntriples(g2)
    assert text.splitlines() == sorted(text.splitlines())


def test_parse_missing_dot_is_syntax_error():
    with pytest.raises(NTriplesError) as excinfo:
        parse_ntriples(io.StringIO("<http://e/a> <http://e/r> <http://e/b>\n"))
    assert excinfo.value.line_number == 1


def test_parse_literal_is_unsupported():
    with pytest.raises(NTriplesError, match="literal"):
        parse_ntriples(io.StringIO('<http://e/a> <http://e/r> "text" .\n'))


def test_parse_blank_node_is_unsupported():
    with pytest.raises(NTriplesError, match="blank-node"):
        parse_ntriples(io.StringIO("_:a <http://e/r> <http://e/b> .\n"))


def test_parse_reports_correct_line_number():
    text = "<http://e/a> <http://e/r> <http://e/b> .\n# comment\n\nbroken line\n"
    with pytest.raises(NTriplesError) as excinfo:
        parse_ntriples(io.StringIO(text))
    assert excinfo.value.line_number == 4


def test_angle_brackets_in_uri_are_escaped():
    graph = KnowledgeGraph()
    graph.add("http://e/a<b>", "http://e/r", "http://e/o")
    line = dumps_ntriples(graph)
    assert "<b>" not in line.split(" ")[0][1:-1]
    parsed = parse_ntriples(io.StringIO(line))
    assert parsed.has("http://e/a<b>", "http://e/r", "http://e/o")


# -- properties -------------------------------------------------------

uri_strategy = st.text(
    alphabet=st.characters(
        codec="utf-8", exclude_categories=("Cs", "Cc", "Zs", "Zl", "Zp")
    ),
    min_size=1,
    max_size=30,
).map(lambda s: "http://x/" + s)

triple_strategy = st.tuples(uri_strategy, uri_strategy, uri_strategy)


@given(st.lists(triple_strategy, max_size=60))
@settings(max_examples=200)
def test_roundtrip_preserves_triple_set(raw_triples):
    graph = KnowledgeGraph()
    for s, r, o in raw_triples:
        graph.add(s, r, o)
    parsed = parse_ntriples(io.StringIO(dumps_ntriples(graph)))
    assert set(parsed.triples()) == set(graph.triples())


@given(st.lists(triple_strategy, max_size=40))
@settings(max_examples=150)
def test_forward_inverse_are_mirrors(raw_triples):
    graph = KnowledgeGraph()
    for s, r, o in raw_triples:
        graph.add(s, r, o)
    for triple in graph.triples():
        assert triple.object in graph.successors(triple.subject, triple.relation)
        assert triple.subject in graph.predecessors(triple.object, triple.relation)
    for entity in graph.entities():
        for other in graph.successors(entity, ANY):
            assert entity in graph.predecessors(other, ANY)


@given(st.lists(triple_strategy, max_size=40))
@settings(max_examples=100)
def test_triple_count_equals_fanout_sum(raw_triples):
    graph = KnowledgeGraph()
    for s, r, o in raw_triples:
        graph.add(s, r, o)
    fanout = sum(
        len(graph.successors(subject, relation))
        for subject in graph.entities()
        for relation in graph.relations()
    )
    assert fanout == len(graph)


@given(triple_strategy)
@settings(max_examples=100)
def test_format_line_parses_back(raw_triple):
    s, r, o = raw_triple
    line = format_triple(Triple(s, r, o))
    parsed = parse_ntriples([line])
    assert parsed.has(s, r, o)
