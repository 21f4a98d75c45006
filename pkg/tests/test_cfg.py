import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcdep.cfg import (
    CfgError,
    binarize_dependency,
    embedding_degree,
    from_bracketed,
    leaves,
    max_depth_after_reduce,
    max_depth_after_shift,
    parse_from_shape,
    pre_shift_depths,
    simulate_pda,
    to_bracketed,
    token_embedding_degree,
)
from lcdep.exhaustive import cnf_shapes, dependency_binarizations, projective_deptrees
from lcdep.treebank import tree_from_heads
from tests.util import chain_degree, chain_token_degree, random_projective_tree

DEGREE1 = "(S (A a) (B (C (B2 b) (C2 c)) (D d)))"
DEGREE2 = "(S (A2 a2) (B1 (C1 (A a) (B2 (C2 (B b) (C c)) (D2 d))) (D1 d2)))"
MIRROR = "(S (B (A a) (C (B2 b) (C2 c))) (D d))"


def test_bracketed_round_trip():
    p = from_bracketed(DEGREE1)
    assert to_bracketed(p) == DEGREE1
    assert leaves(p) == ["a", "b", "c", "d"]
    with pytest.raises(CfgError):
        from_bracketed("(S (A a) (B b) (C c))")


def test_embedding_degree_frozen():
    assert embedding_degree(from_bracketed(DEGREE1)) == 1
    assert embedding_degree(from_bracketed(DEGREE2)) == 2
    # the mirror-image pattern does not count as center-embedding
    assert embedding_degree(from_bracketed(MIRROR)) == 0


def test_token_degrees_frozen():
    p1 = from_bracketed(DEGREE1)
    assert [token_embedding_degree(p1, i) for i in range(1, 5)] == [0, 0, 1, 0]
    p2 = from_bracketed(DEGREE2)
    assert [token_embedding_degree(p2, i) for i in range(1, 7)] == [0, 0, 1, 2, 1, 0]
    pm = from_bracketed(MIRROR)
    assert [token_embedding_degree(pm, i) for i in range(1, 5)] == [0, 0, 0, 0]


@pytest.mark.parametrize("n", range(1, 8))
def test_degree_matches_chain_search(n):
    for shape in cnf_shapes(n):
        parse = parse_from_shape(shape)
        assert embedding_degree(parse) == chain_degree(parse)


@pytest.mark.parametrize("n", range(2, 7))
def test_token_degree_matches_chain_search(n):
    for shape in cnf_shapes(n):
        parse = parse_from_shape(shape)
        for pos in range(1, n + 1):
            assert token_embedding_degree(parse, pos) == \
                chain_token_degree(parse, pos), to_bracketed(parse)


@pytest.mark.parametrize("n", range(1, 8))
def test_edge_tokens_have_degree_zero(n):
    for shape in cnf_shapes(n):
        parse = parse_from_shape(shape)
        assert token_embedding_degree(parse, 1) == 0
        assert token_embedding_degree(parse, n) == 0


def test_main_pda_frozen_trace():
    trace = simulate_pda(from_bracketed(DEGREE1), "main")
    assert [s.action for s in trace.steps] == [
        "Shift", "Prediction", "Shift", "Prediction", "Scan",
        "Composition", "Scan",
    ]
    assert [s.depth for s in trace.steps] == [1, 1, 2, 2, 2, 1, 1]
    assert trace.steps[3].stack == ("S/B", "C/C2")
    assert max_depth_after_reduce(trace) == 2


def test_main_pda_mirror_trace():
    trace = simulate_pda(from_bracketed(MIRROR), "main")
    assert [s.action for s in trace.steps] == [
        "Shift", "Prediction", "Shift", "Composition", "Scan",
        "Prediction", "Scan",
    ]
    assert max_depth_after_reduce(trace) == 1
    assert max_depth_after_shift(trace) == 2


def test_alt_pda_traces():
    # the alternative machine penalizes left-branching instead
    alt_deg1 = simulate_pda(from_bracketed(DEGREE1), "alt")
    assert [s.action for s in alt_deg1.steps] == [
        "Shift", "Composition", "Shift", "Prediction", "Scan",
        "Composition", "Scan",
    ]
    assert alt_deg1.depths("afterShift") == [1, 1, 1, 0]
    alt_mirror = simulate_pda(from_bracketed(MIRROR), "alt")
    assert alt_mirror.depths("afterShift") == [1, 2, 1, 0]
    assert max_depth_after_shift(alt_mirror) == 2


def test_pre_shift_depths_frozen():
    trace = simulate_pda(from_bracketed(DEGREE1), "main")
    assert pre_shift_depths(trace) == [(1, 0), (2, 1), (3, 2), (4, 1)]


@pytest.mark.parametrize("n", range(1, 7))
def test_depth_theorem_small(n):
    # reduce-depth of the main machine, minus one, is the embedding degree
    for shape in cnf_shapes(n):
        parse = parse_from_shape(shape)
        trace = simulate_pda(parse, "main")
        assert max_depth_after_reduce(trace) - 1 == embedding_degree(parse)


@pytest.mark.parametrize("n", range(2, 7))
def test_pre_shift_lemma_small(n):
    for shape in cnf_shapes(n):
        parse = parse_from_shape(shape)
        for pos, depth in pre_shift_depths(simulate_pda(parse, "main")):
            if pos > 1:
                assert depth == token_embedding_degree(parse, pos) + 1


def test_binarize_dependency_frozen():
    t = tree_from_heads([2, 0, 4, 2, 4], forms=list("abcde"))
    parse = binarize_dependency(t)
    assert to_bracketed(parse) == (
        "(X[b] (X[b] (X[a] a) (X[b] b)) "
        "(X[d] (X[c] c) (X[d] (X[d] d) (X[e] e))))"
    )


def test_binarize_is_a_binarization():
    for tree in projective_deptrees(5):
        parse = binarize_dependency(tree)
        briefs = {to_bracketed(p) for p in dependency_binarizations(tree)}
        assert to_bracketed(parse) in briefs


def test_binarize_rejects_nonprojective():
    with pytest.raises(CfgError):
        binarize_dependency(tree_from_heads([0, 4, 1, 1]))


@settings(deadline=None, max_examples=40)
@given(st.integers(2, 9), st.integers(0, 10_000))
def test_binarization_yields_match_tree(n, seed):
    tree = random_projective_tree(n, seed)
    parse = binarize_dependency(tree)
    assert leaves(parse) == list(tree.forms)
    # every head annotation points at the subtree's head token
    def heads_ok(node, lo):
        if node.is_preterminal:
            return lo + 1
        mid = heads_ok(node.children[0], lo)
        hi = heads_ok(node.children[1], mid)
        assert lo < node.head <= hi
        return hi
    heads_ok(parse, 0)
