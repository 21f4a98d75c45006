"""CNF parses, center-embedding degree, and left-corner PDA simulation.

The degree of center-embedding is defined on a parse via zig-zag paths that
start with right edges; it is computed here from each token's root-to-leaf
edge path. Two pushdown automata realize the left-corner strategy; both are
run as deterministic recognizers of a *given* parse, and the main variant's
stack depth after reduce transitions, minus one, equals the degree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .treebank import DepTree, is_projective


class CfgError(ValueError):
    pass


@dataclass(frozen=True)
class CfgParse:
    """A CNF parse node: two CfgParse children, or a preterminal whose single
    child is the terminal string. `head` optionally records the head token
    position for dependency-derived parses."""

    label: str
    children: tuple
    head: int | None = None

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and isinstance(self.children[0], str)

    def validate(self):
        if self.is_preterminal:
            return
        if len(self.children) != 2 or not all(
                isinstance(c, CfgParse) for c in self.children):
            raise CfgError("node %r is not CNF (needs 2 nonterminal children "
                           "or 1 terminal child)" % self.label)
        for c in self.children:
            c.validate()

    def __str__(self):
        return to_bracketed(self)


def preterminal(label: str, terminal: str, head: int | None = None) -> CfgParse:
    return CfgParse(label, (terminal,), head=head)


def to_bracketed(parse: CfgParse) -> str:
    if parse.is_preterminal:
        return "(%s %s)" % (parse.label, parse.children[0])
    return "(%s %s %s)" % (parse.label,
                           to_bracketed(parse.children[0]),
                           to_bracketed(parse.children[1]))


def from_bracketed(text: str) -> CfgParse:
    """Parse "(S (A a) (B b))" style trees."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse_node():
        nonlocal pos
        if tokens[pos] != "(":
            raise CfgError("expected '(' at token %d" % pos)
        pos += 1
        label = tokens[pos]
        pos += 1
        kids = []
        while tokens[pos] != ")":
            if tokens[pos] == "(":
                kids.append(parse_node())
            else:
                kids.append(tokens[pos])
                pos += 1
        pos += 1
        if len(kids) == 1 and isinstance(kids[0], str):
            return CfgParse(label, (kids[0],))
        if len(kids) == 2 and all(isinstance(k, CfgParse) for k in kids):
            return CfgParse(label, tuple(kids))
        raise CfgError("node %s is not CNF" % label)

    node = parse_node()
    if pos != len(tokens):
        raise CfgError("trailing content after tree")
    return node


def parse_from_shape(shape, labels: str = "N") -> CfgParse:
    """Materialize a `cnf_shapes` nested-tuple shape as a parse with distinct
    nonterminal labels and terminals t1..tn."""
    counter = [0]

    def build(s):
        counter[0] += 1
        name = "%s%d" % (labels, counter[0])
        if isinstance(s, int):
            return preterminal(name, "t%d" % s)
        return CfgParse(name, (build(s[0]), build(s[1])))

    return build(shape)


def leaves(parse: CfgParse) -> list[str]:
    if parse.is_preterminal:
        return [parse.children[0]]
    return leaves(parse.children[0]) + leaves(parse.children[1])


def _token_paths(parse: CfgParse) -> list[list[str]]:
    """Root-to-preterminal edge path ('L'/'R') for each token, in order."""
    out = []

    def walk(node, path):
        if node.is_preterminal:
            out.append(list(path))
            return
        walk(node.children[0], path + ["L"])
        walk(node.children[1], path + ["R"])

    walk(parse, [])
    return out


def _degree_from_path(path: list[str]) -> int:
    """Degree of center-embedding for one token from its edge path.

    The zig-zag pattern is anchored at the token and extends upward through
    alternating runs, starting with a right-edge run; a leading left-edge run
    belongs to the unconstrained prefix. If the path ends inside a left-edge
    run, the innermost embedded constituent is the token itself (one word),
    which does not count as an embedding, so one level is subtracted.
    """
    runs = []
    for e in path:
        if runs and runs[-1][0] == e:
            runs[-1] = (e, runs[-1][1] + 1)
        else:
            runs.append((e, 1))
    if runs and runs[0][0] == "L":
        runs = runs[1:]
    if not runs:
        return 0
    m = sum(1 for e, _ in runs if e == "L")
    if runs[-1][0] == "L":
        return m - 1
    return m


def token_embedding_degree(parse: CfgParse, position: int) -> int:
    paths = _token_paths(parse)
    if not (1 <= position <= len(paths)):
        raise CfgError("token position %d out of range" % position)
    return _degree_from_path(paths[position - 1])


def embedding_degree(parse: CfgParse) -> int:
    return max(_degree_from_path(p) for p in _token_paths(parse))


# ---------------------------------------------------------------------------
# PDA simulation


@dataclass(frozen=True)
class PdaStep:
    action: str  # Shift | Scan | Prediction | Composition
    stack: tuple[str, ...]
    depth: int
    position: int  # input tokens consumed so far
    phase: str  # afterShift | afterReduce


@dataclass(frozen=True)
class PdaTrace:
    variant: str
    steps: tuple[PdaStep, ...]

    def depths(self, phase: str) -> list[int]:
        return [s.depth for s in self.steps if s.phase == phase]


class _Nodes:
    """Positional index of a parse: parents, sides, leftmost preterminals."""

    def __init__(self, parse: CfgParse):
        parse.validate()
        self.label = {}
        self.parent = {}
        self.side = {}
        self.kids = {}
        self.corner = {}
        self.preterm_pos = {}
        self._n = 0
        self._pos = 0
        self.root = self._walk(parse, None, None)

    def _walk(self, node, parent, side):
        uid = self._n
        self._n += 1
        self.label[uid] = node.label
        self.parent[uid] = parent
        self.side[uid] = side
        if node.is_preterminal:
            self._pos += 1
            self.preterm_pos[uid] = self._pos
            self.kids[uid] = None
            self.corner[uid] = uid
        else:
            l = self._walk(node.children[0], uid, "L")
            r = self._walk(node.children[1], uid, "R")
            self.kids[uid] = (l, r)
            self.corner[uid] = self.corner[l]
        return uid

    def is_preterm(self, uid) -> bool:
        return self.kids[uid] is None


def simulate_pda(parse: CfgParse, variant: str = "main") -> PdaTrace:
    if variant == "main":
        return _simulate_main(parse)
    if variant == "alt":
        return _simulate_alt(parse)
    raise CfgError("unknown PDA variant %r" % variant)


def _simulate_main(parse: CfgParse) -> PdaTrace:
    """Deterministic replay of the main left-corner PDA.

    Stack symbols are complete nonterminals A or incomplete A/B ("A once B is
    found"). Shift pushes the leftmost preterminal of the expected node; Scan
    completes the top incomplete symbol on a predicted preterminal;
    Prediction turns a completed left child into parent/right-sibling;
    Composition merges a completed left child into the incomplete item below.
    Starts empty, accepts on stack [root].
    """
    nx = _Nodes(parse)
    steps = []
    pos = 0
    # stack entries: ("C", node) complete | ("I", anc, expected) for anc/expected
    stack: list[tuple] = []

    def render():
        out = []
        for it in stack:
            if it[0] == "C":
                out.append(nx.label[it[1]])
            else:
                out.append("%s/%s" % (nx.label[it[1]], nx.label[it[2]]))
        return tuple(out)

    def record(action, phase):
        steps.append(PdaStep(action, render(), len(stack), pos, phase))

    def shift_phase(expected):
        nonlocal pos
        if nx.is_preterm(expected) and stack and stack[-1][0] == "I" \
                and stack[-1][2] == expected:
            anc = stack[-1][1]
            stack[-1] = ("C", anc)
            pos += 1
            record("Scan", "afterShift")
        else:
            corner = nx.corner[expected]
            stack.append(("C", corner))
            pos += 1
            record("Shift", "afterShift")

    def reduce_phase():
        top = stack[-1][1]
        if top == nx.root:
            return True
        par = nx.parent[top]
        assert nx.side[top] == "L", "completed non-root node must be a left child"
        right = nx.kids[par][1]
        if len(stack) >= 2 and stack[-2][0] == "I" and stack[-2][2] == par:
            anc = stack[-2][1]
            stack.pop()
            stack[-1] = ("I", anc, right)
            record("Composition", "afterReduce")
        else:
            stack[-1] = ("I", par, right)
            record("Prediction", "afterReduce")
        return False

    shift_phase(nx.root)
    while not reduce_phase():
        shift_phase(stack[-1][2])
    assert len(stack) == 1 and stack[0] == ("C", nx.root)
    return PdaTrace("main", tuple(steps))


def _simulate_alt(parse: CfgParse) -> PdaTrace:
    """Deterministic replay of the alternative left-corner PDA (goal-driven:
    symbols are goals A or goal-with-left-corner A-B; starts with the root
    goal, accepts on the empty stack)."""
    nx = _Nodes(parse)
    steps = []
    pos = 0
    # entries: ("G", goal) | ("LC", goal, corner)
    stack: list[tuple] = [("G", nx.root)]

    def render():
        out = []
        for it in stack:
            if it[0] == "G":
                out.append(nx.label[it[1]])
            else:
                out.append("%s-%s" % (nx.label[it[1]], nx.label[it[2]]))
        return tuple(out)

    def record(action, phase):
        steps.append(PdaStep(action, render(), len(stack), pos, phase))

    while stack:
        kind = stack[-1][0]
        if kind == "G":
            goal = stack[-1][1]
            if nx.is_preterm(goal):
                stack.pop()
                pos += 1
                record("Scan", "afterShift")
            else:
                stack[-1] = ("LC", goal, nx.corner[goal])
                pos += 1
                record("Shift", "afterShift")
        else:
            _, goal, corner = stack[-1]
            par = nx.parent[corner]
            right = nx.kids[par][1]
            if par == goal:
                stack[-1] = ("G", right)
                record("Composition", "afterReduce")
            else:
                stack[-1] = ("LC", goal, par)
                stack.append(("G", right))
                record("Prediction", "afterReduce")
    return PdaTrace("alt", tuple(steps))


def max_depth_after_reduce(trace: PdaTrace) -> int:
    """Maximum stack depth over post-reduce configurations (floor 1, so a
    single-token parse with no reduce steps reports 1)."""
    return max(trace.depths("afterReduce"), default=1)


def max_depth_after_shift(trace: PdaTrace) -> int:
    return max(trace.depths("afterShift"), default=0)


def pre_shift_depths(trace: PdaTrace) -> list[tuple[int, int]]:
    """(token position, stack depth immediately before its shift-type step)."""
    out = []
    prev_depth = 1 if trace.variant == "alt" else 0
    for step in trace.steps:
        if step.phase == "afterShift":
            out.append((step.position, prev_depth))
        prev_depth = step.depth
    return out


def binarize_dependency(tree: DepTree) -> CfgParse:
    """The left-corner oracle's implicit CNF binarization of a projective
    dependency tree: a head groups its left children first when its parent
    lies to the right (or it is the root), its right children first when the
    parent lies to the left. Nearest dependents attach innermost."""
    if not is_projective(tree):
        raise CfgError("binarize_dependency requires a projective tree")
    forms = tree.forms
    children = {i: tree.children(i) for i in range(len(tree) + 1)}
    heads = tree.heads

    def phrase(h: int) -> CfgParse:
        label = "X[%s]" % forms[h - 1]
        node = preterminal(label, forms[h - 1], head=h)
        lefts = sorted((c for c in children[h] if c < h), reverse=True)
        rights = sorted(c for c in children[h] if c > h)
        parent_left = heads[h - 1] != 0 and heads[h - 1] < h
        first, second = (rights, lefts) if parent_left else (lefts, rights)
        for dep in first:
            sub = phrase(dep)
            node = CfgParse(label, (sub, node) if dep < h else (node, sub), head=h)
        for dep in second:
            sub = phrase(dep)
            node = CfgParse(label, (sub, node) if dep < h else (node, sub), head=h)
        return node

    return phrase(tree.root)
