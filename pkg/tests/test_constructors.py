"""Membership oracle: per-family semantics, consistency, degeneracies."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgcbench.constructors import (
    ConstructorExpr,
    ExprError,
    enumerate_members,
    matches,
)
from kgcbench.graph import KnowledgeGraph


def ex(name: str) -> str:
    return f"http://example.org/{name}"


TYPE = "http://example.org/type"


def build(*triples) -> KnowledgeGraph:
    graph = KnowledgeGraph(type_relation=TYPE)
    for s, r, o in triples:
        graph.add(ex(s), ex(r), ex(o))
    return graph


# -- per-family hand-checked cases ------------------------------------


def test_tc01_single_edge():
    graph = build(("a", "r", "b"))
    expr = ConstructorExpr("tc01", r=ex("r"))
    assert matches(graph, expr, ex("a")) is True
    assert matches(graph, expr, ex("b")) is False


def test_tc02_single_edge():
    graph = build(("a", "r", "b"))
    expr = ConstructorExpr("tc02", r=ex("r"))
    assert matches(graph, expr, ex("b")) is True
    assert matches(graph, expr, ex("a")) is False


def test_tc03_union_of_directions():
    graph = build(("a", "r", "b"))
    expr = ConstructorExpr("tc03", r=ex("r"))
    assert enumerate_members(graph, expr) == {ex("a"), ex("b")}


def test_tc04_direct_connection_either_way():
    graph = build(("a", "p", "e"), ("e", "q", "b"), ("c", "p", "d"))
    expr = ConstructorExpr("tc04", e=ex("e"))
    assert matches(graph, expr, ex("a")) is True
    assert matches(graph, expr, ex("b")) is True
    assert matches(graph, expr, ex("c")) is False


def test_tc05_two_hop_same_direction_only():
    # forward chain: a -> z -> e; backward chain: e -> w -> b
    graph = build(("a", "p", "z"), ("z", "q", "e"), ("e", "p", "w"), ("w", "q", "b"))
    expr = ConstructorExpr("tc05", e=ex("e"))
    assert matches(graph, expr, ex("a")) is True
    assert matches(graph, expr, ex("b")) is True
    # mixed-direction chain does not count: c -> m <- e
    graph2 = build(("c", "p", "m"), ("e", "q", "m"))
    assert matches(graph2, ConstructorExpr("tc05", e=ex("e")), ex("c")) is False


def test_tc06_requires_specific_relation_and_target():
    graph = build(("a", "r", "e"), ("b", "s", "e"), ("c", "r", "d"))
    expr = ConstructorExpr("tc06", r=ex("r"), e=ex("e"))
    assert matches(graph, expr, ex("a")) is True
    assert matches(graph, expr, ex("b")) is False
    assert matches(graph, expr, ex("c")) is False


def test_tc07_hand_evaluated_two_triple_graph():
    graph = build(("a", "r", "b"), ("b", "type", "T"))
    expr = ConstructorExpr("tc07", r=ex("r"), T=ex("T"))
    assert matches(graph, expr, ex("a")) is True
    graph2 = build(("a", "r", "b"), ("b", "type", "S"))
    assert matches(graph2, expr, ex("a")) is False


def test_tc08_inverse_qualified():
    graph = build(("b", "r", "a"), ("b", "type", "T"))
    expr = ConstructorExpr("tc08", r=ex("r"), T=ex("T"))
    assert matches(graph, expr, ex("a")) is True
    assert matches(graph, expr, ex("b")) is False


def test_tc09_cardinality_boundary():
    expr = ConstructorExpr("tc09", r=ex("r"), min_card=2)
    assert matches(build(("a", "r", "b")), expr, ex("a")) is False
    assert matches(build(("a", "r", "b"), ("a", "r", "c")), expr, ex("a")) is True


def test_tc10_cardinality_boundary():
    expr = ConstructorExpr("tc10", r=ex("r"), min_card=2)
    assert matches(build(("b", "r", "a")), expr, ex("a")) is False
    assert matches(build(("b", "r", "a"), ("c", "r", "a")), expr, ex("a")) is True


def test_tc11_counts_only_typed_targets():
    graph = build(
        ("a", "r", "b"),
        ("a", "r", "c"),
        ("a", "r", "d"),
        ("b", "type", "T"),
        ("c", "type", "T"),
    )
    assert matches(graph, ConstructorExpr("tc11", r=ex("r"), T=ex("T"), min_card=2), ex("a"))
    assert not matches(
        graph, ConstructorExpr("tc11", r=ex("r"), T=ex("T"), min_card=3), ex("a")
    )


def test_tc12_counts_only_typed_sources():
    graph = build(
        ("b", "r", "a"),
        ("c", "r", "a"),
        ("b", "type", "T"),
        ("c", "type", "T"),
    )
    assert matches(graph, ConstructorExpr("tc12", r=ex("r"), T=ex("T"), min_card=2), ex("a"))


def test_type_check_uses_direct_assertions_only():
    # b is typed Sub, Sub is related to T, but no closure is applied
    graph = build(("a", "r", "b"), ("b", "type", "Sub"), ("Sub", "subclassOf", "T"))
    expr = ConstructorExpr("tc07", r=ex("r"), T=ex("T"))
    assert matches(graph, expr, ex("a")) is False


def test_enumerate_tc01():
    graph = build(("a", "r", "b"))
    assert enumerate_members(graph, ConstructorExpr("tc01", r=ex("r"))) == {ex("a")}


# -- expression validation and text form -------------------------------


def test_expr_requires_exact_fields():
    with pytest.raises(ExprError):
        ConstructorExpr("tc01")  # missing r
    with pytest.raises(ExprError):
        ConstructorExpr("tc01", r=ex("r"), e=ex("e"))  # extra e
    with pytest.raises(ExprError):
        ConstructorExpr("tc07", r=ex("r"))  # missing T
    with pytest.raises(ExprError):
        ConstructorExpr("tc99", r=ex("r"))  # unknown family
    with pytest.raises(ExprError):
        ConstructorExpr("tc09", r=ex("r"), min_card=0)


def test_expr_text_roundtrip():
    exprs = [
        ConstructorExpr("tc01", r=ex("r")),
        ConstructorExpr("tc04", e=ex("e")),
        ConstructorExpr("tc06", r=ex("r"), e=ex("e")),
        ConstructorExpr("tc07", r=ex("r"), T=ex("T")),
        ConstructorExpr("tc11", r=ex("r"), T=ex("T"), min_card=2),
    ]
    for expr in exprs:
        assert ConstructorExpr.from_text(expr.to_text()) == expr


def test_expr_text_canonical_form():
    expr = ConstructorExpr("tc07", r=ex("r"), T=ex("T"))
    assert expr.to_text() == "tc07 r=<http://example.org/r> T=<http://example.org/T>"


def test_expr_text_rejects_garbage():
    with pytest.raises(ExprError):
        ConstructorExpr.from_text("")
    with pytest.raises(ExprError):
        ConstructorExpr.from_text("tc01 r=no-brackets")


# -- randomized consistency properties ---------------------------------

_NODES = [ex(f"n{i}") for i in range(8)]
_RELS = [ex("r"), ex("s"), TYPE]

random_graph = st.lists(
    st.tuples(
        st.sampled_from(_NODES), st.sampled_from(_RELS), st.sampled_from(_NODES)
    ),
    max_size=25,
)


def _graph_from(triples) -> KnowledgeGraph:
    graph = KnowledgeGraph(type_relation=TYPE)
    for s, r, o in triples:
        graph.add(s, r, o)
    return graph


def _all_small_exprs():
    exprs = []
    for family in ("tc01", "tc02", "tc03"):
        exprs.append(ConstructorExpr(family, r=ex("r")))
    for family in ("tc04", "tc05"):
        exprs.append(ConstructorExpr(family, e=_NODES[0]))
    exprs.append(ConstructorExpr("tc06", r=ex("r"), e=_NODES[0]))
    exprs.append(ConstructorExpr("tc07", r=ex("r"), T=_NODES[1]))
    exprs.append(ConstructorExpr("tc08", r=ex("r"), T=_NODES[1]))
    exprs.append(ConstructorExpr("tc09", r=ex("r"), min_card=2))
    exprs.append(ConstructorExpr("tc10", r=ex("r"), min_card=2))
    exprs.append(ConstructorExpr("tc11", r=ex("r"), T=_NODES[1], min_card=2))
    exprs.append(ConstructorExpr("tc12", r=ex("r"), T=_NODES[1], min_card=2))
    return exprs


@given(random_graph)
@settings(max_examples=120)
def test_enumerate_is_filter_of_matches(triples):
    graph = _graph_from(triples)
    for expr in _all_small_exprs():
        expected = {x for x in graph.entities() if matches(graph, expr, x)}
        assert enumerate_members(graph, expr) == expected


@given(random_graph, st.tuples(st.sampled_from(_NODES), st.sampled_from(_RELS), st.sampled_from(_NODES)))
@settings(max_examples=120)
def test_adding_a_triple_is_monotone(triples, extra):
    graph = _graph_from(triples)
    before = {expr: enumerate_members(graph, expr) for expr in _all_small_exprs()}
    graph.add(*extra)
    for expr, members in before.items():
        assert members <= enumerate_members(graph, expr)


@given(random_graph)
@settings(max_examples=120)
def test_tc03_is_union_of_tc01_and_tc02(triples):
    graph = _graph_from(triples)
    tc01 = enumerate_members(graph, ConstructorExpr("tc01", r=ex("r")))
    tc02 = enumerate_members(graph, ConstructorExpr("tc02", r=ex("r")))
    tc03 = enumerate_members(graph, ConstructorExpr("tc03", r=ex("r")))
    assert tc03 == tc01 | tc02


@given(random_graph)
@settings(max_examples=120)
def test_degenerate_min_card_matches_existential_forms(triples):
    graph = _graph_from(triples)
    assert enumerate_members(
        graph, ConstructorExpr("tc09", r=ex("r"), min_card=1)
    ) == enumerate_members(graph, ConstructorExpr("tc01", r=ex("r")))
    assert enumerate_members(
        graph, ConstructorExpr("tc11", r=ex("r"), T=_NODES[1], min_card=1)
    ) == enumerate_members(graph, ConstructorExpr("tc07", r=ex("r"), T=_NODES[1]))
