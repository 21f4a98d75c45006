"""Exhaustive enumeration oracles.

Small-n ground truth that the efficient algorithms are tested against:
projective tree enumeration, CNF shape enumeration, and enumeration of all
CNF binarizations of a dependency tree. Brute-force grammar scoring lives in
`sbg` next to the chart it checks.
"""

from __future__ import annotations

from .treebank import DepTree, tree_from_heads


def projective_trees(n: int) -> list[tuple[int, ...]]:
    """All single-root projective dependency trees over n tokens, returned as
    head tuples (entry i is the head of token i+1; 0 marks the root).

    Built span-recursively: a tree over [i..j] picks a root r and tiles
    [i..r-1] and [r+1..j] with consecutive child subtrees. This yields
    exactly the trees accepted by `treebank.is_projective` with one root.
    """
    if n <= 0:
        return []
    trees_memo: dict[tuple[int, int], list] = {}
    forests_memo: dict[tuple[int, int], list] = {}

    def trees(i, j):
        if (i, j) in trees_memo:
            return trees_memo[(i, j)]
        out = []
        for r in range(i, j + 1):
            for lroots, larcs in forests(i, r - 1):
                for rroots, rarcs in forests(r + 1, j):
                    arcs = larcs + rarcs + tuple((r, c) for c in lroots + rroots)
                    out.append((r, arcs))
        trees_memo[(i, j)] = out
        return out

    def forests(i, j):
        if i > j:
            return [((), ())]
        if (i, j) in forests_memo:
            return forests_memo[(i, j)]
        out = []
        for k in range(i, j + 1):
            for r1, a1 in trees(i, k):
                for roots2, a2 in forests(k + 1, j):
                    out.append(((r1,) + roots2, a1 + a2))
        forests_memo[(i, j)] = out
        return out

    result = []
    for root, arcs in trees(1, n):
        heads = [0] * n
        for h, d in arcs:
            heads[d - 1] = h
        result.append(tuple(heads))
    return result


def projective_deptrees(n: int, tags=None) -> list[DepTree]:
    return [tree_from_heads(hs, tags=tags) for hs in projective_trees(n)]


def cnf_shapes(n: int):
    """All binary tree shapes over n leaves, as nested tuples; a leaf is the
    integer terminal position, an internal node a pair (left, right)."""

    def build(lo, hi):
        if lo == hi:
            return [lo]
        out = []
        for k in range(lo, hi):
            for l in build(lo, k):
                for r in build(k + 1, hi):
                    out.append((l, r))
        return out

    return build(1, n)


def binarization_interleavings(p: int, q: int):
    """All orders of attaching p left and q right dependents bottom-up:
    sequences over {'L','R'} with p L's and q R's."""
    if p == 0 and q == 0:
        return [()]
    out = []
    if p > 0:
        out.extend([("L",) + rest for rest in binarization_interleavings(p - 1, q)])
    if q > 0:
        out.extend([("R",) + rest for rest in binarization_interleavings(p, q - 1)])
    return out


def dependency_binarizations(tree: DepTree):
    """Every CNF parse that projects to the given projective dependency tree
    (all per-head attachment orders, recursively). Returned as `cfg.CfgParse`
    objects with head annotations."""
    from .cfg import CfgParse, preterminal

    forms = tree.forms
    children = {i: tree.children(i) for i in range(len(tree) + 1)}

    def phrases(h: int) -> list:
        lefts = [c for c in children[h] if c < h]
        rights = [c for c in children[h] if c > h]
        lefts.sort(reverse=True)  # nearest-first attachment order
        rights.sort()
        sub_l = [phrases(c) for c in lefts]
        sub_r = [phrases(c) for c in rights]
        label = "X[%s]" % forms[h - 1]
        base = preterminal(label, forms[h - 1], head=h)
        out = []
        for order in binarization_interleavings(len(lefts), len(rights)):
            def expand(k, li, ri, cur):
                if k == len(order):
                    out.append(cur)
                    return
                if order[k] == "L":
                    for dep in sub_l[li]:
                        expand(k + 1, li + 1, ri,
                               CfgParse(label, (dep, cur), head=h))
                else:
                    for dep in sub_r[ri]:
                        expand(k + 1, li, ri + 1,
                               CfgParse(label, (cur, dep), head=h))
            expand(0, 0, 0, base)
        return out

    return phrases(tree.root)
