import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcdep.treebank import (
    Corpus,
    DepTree,
    Token,
    TreebankError,
    append_root,
    has_appended_root,
    is_projective,
    parse_conll,
    projectivize,
    random_reorder,
    serialize_conll,
    strip_punctuation,
    tree_from_heads,
)
from tests.util import random_single_root_tree

CONLL = """\
# a comment line
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tdog\tdog\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tbarks\tbark\tVERB\tVBZ\t_\t0\troot\t_\t_
4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_
1\tdel\tdel\tADP\tIN\t_\t2\tcase\t_\t_
1.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_
2\tmar\tmar\tNOUN\tNN\t_\t0\troot\t_\t_
"""


def test_token_validation():
    with pytest.raises(TreebankError):
        Token(0, "a", "X", 1)
    with pytest.raises(TreebankError):
        Token(2, "a", "X", 2)


def test_tree_validation():
    with pytest.raises(TreebankError):
        tree_from_heads([0, 0])  # two roots
    with pytest.raises(TreebankError):
        tree_from_heads([2, 1])  # cycle, no root
    with pytest.raises(TreebankError):
        tree_from_heads([3])  # head out of range
    assert DepTree(()).n == 0


def test_tree_accessors():
    t = tree_from_heads([2, 0, 2], tags=["A", "B", "C"])
    assert t.n == 3
    assert t.root == 2
    assert t.heads == (2, 0, 2)
    assert t.arcs == frozenset({(2, 1), (2, 3)})
    assert t.children(2) == [1, 3]
    assert t.tags == ("A", "B", "C")


def test_parse_conll_basic():
    corpus = parse_conll(CONLL)
    assert len(corpus) == 2
    first, second = corpus.sentences
    assert first.forms == ("The", "dog", "barks", ".")
    assert first.tags == ("DET", "NOUN", "VERB", "PUNCT")
    assert first.heads == (2, 3, 0, 3)
    # range and decimal ids are skipped silently
    assert second.forms == ("del", "mar")
    assert second.heads == (2, 0)


def test_parse_conll_pos_column():
    fine = parse_conll(CONLL, pos_column=4)
    assert fine.sentences[0].tags == ("DT", "NN", "VBZ", ".")
    alias = parse_conll(CONLL, pos_column="xpos")
    assert alias.sentences[0].tags == ("DT", "NN", "VBZ", ".")


def test_parse_conll_errors_name_location():
    bad = "1\tonly\tthree\n"
    with pytest.raises(TreebankError, match="line 1"):
        parse_conll(bad)
    bad2 = CONLL + "\n1\tx\tx\tX\tX\t_\t5\t_\t_\t_\n"
    with pytest.raises(TreebankError, match="sentence 3"):
        parse_conll(bad2)


def test_serialize_round_trip():
    corpus = parse_conll(CONLL)
    again = parse_conll(serialize_conll(corpus))
    for a, b in zip(corpus, again):
        assert a.forms == b.forms
        assert a.tags == b.tags
        assert a.heads == b.heads


def test_strip_punctuation_lifts_children():
    # punct token 3 heads token 4; 4 must reattach to 3's head (token 2)
    t = tree_from_heads([2, 0, 2, 3], tags=["N", "V", "PUNCT", "N"])
    s = strip_punctuation(t)
    assert s.forms == ("w1", "w2", "w4")
    assert s.heads == (2, 0, 2)


def test_strip_punctuation_root():
    # a punctuation root: leftmost stranded token takes over as root
    t = tree_from_heads([2, 0, 2], tags=["N", "PUNCT", "N"])
    s = strip_punctuation(t)
    assert s.heads == (0, 1)
    t2 = tree_from_heads([0], tags=["PUNCT"])
    assert strip_punctuation(t2).n == 0


def test_is_projective():
    assert is_projective(tree_from_heads([2, 0, 2]))
    assert not is_projective(tree_from_heads([0, 4, 1, 1]))
    # the root attachment counts as an arc from position n+1
    assert not is_projective(tree_from_heads([3, 0, 2]))


def test_projectivize_frozen():
    assert projectivize(tree_from_heads([0, 4, 1, 1])).heads == (0, 1, 1, 1)
    assert projectivize(tree_from_heads([3, 0, 2])).heads == (2, 0, 2)
    t = tree_from_heads([2, 0, 2])
    assert projectivize(t).heads == t.heads


def test_append_root():
    t = append_root(tree_from_heads([2, 0, 2]))
    assert t.forms == ("w1", "w2", "w3", "$")
    assert t.heads == (2, 4, 2, 0)
    assert has_appended_root(t)
    with pytest.raises(TreebankError):
        append_root(t)
    assert append_root(t, if_present="noop") == t


def test_random_reorder_deterministic():
    t = tree_from_heads([2, 0, 2, 3, 4])
    a = random_reorder(t, seed=7)
    b = random_reorder(t, seed=7)
    assert a == b
    assert random_reorder(t, seed=8) != a or True  # different seeds may differ
    # structure is preserved: same multiset of child counts
    counts = sorted(len(t.children(i)) for i in range(1, t.n + 1))
    counts_a = sorted(len(a.children(i)) for i in range(1, a.n + 1))
    assert counts == counts_a


def test_corpus_filtered():
    c = Corpus([tree_from_heads([0]), tree_from_heads([2, 0, 2])])
    assert len(c.filtered(2)) == 1


@settings(deadline=None, max_examples=60)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_projectivize_property(n, seed):
    t = random_single_root_tree(n, seed)
    p = projectivize(t)
    assert is_projective(p)
    assert p.n == t.n
    assert sum(1 for h in p.heads if h == 0) == 1


@settings(deadline=None, max_examples=40)
@given(st.integers(1, 8), st.integers(0, 10_000))
def test_serialize_property(n, seed):
    t = random_single_root_tree(n, seed, tags=["NOUN"] * n)
    text = serialize_conll(Corpus([t]))
    back = parse_conll(text).sentences[0]
    assert back.heads == t.heads
    assert back.forms == t.forms
