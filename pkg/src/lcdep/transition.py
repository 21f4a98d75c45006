"""Transition systems for projective dependency parsing with stack-depth
instrumentation.

The left-corner system builds trees with six actions over stacks of right
spines whose unrealized heads are dummy nodes.  Arc-standard and arc-eager
systems are provided as reference points for the depth analyses.  All three
come with deterministic oracles that replay a gold tree and record the stack
depth after every action.
"""

from dataclasses import dataclass

from lcdep.treebank import DepTree

SHIFT = "shift"
INSERT = "insert"
LEFT_PRED = "leftPred"
RIGHT_PRED = "rightPred"
LEFT_COMP = "leftComp"
RIGHT_COMP = "rightComp"

LC_SHIFT_ACTIONS = (SHIFT, INSERT)
LC_REDUCE_ACTIONS = (LEFT_PRED, RIGHT_PRED, LEFT_COMP, RIGHT_COMP)
LC_ACTIONS = LC_SHIFT_ACTIONS + LC_REDUCE_ACTIONS

LEFT_CORNER = "leftCorner"
ARC_STANDARD = "arcStandard"
ARC_EAGER = "arcEager"
SYSTEMS = (LEFT_CORNER, ARC_STANDARD, ARC_EAGER)


class TransitionError(Exception):
    """An action was applied to a configuration that does not license it."""


@dataclass(frozen=True)
class Dummy:
    """Placeholder for a not-yet-seen head.

    ``left`` holds the indices of dependents already attached below the
    placeholder, in the left-to-right order they were collected.
    """

    left: tuple = ()


@dataclass(frozen=True)
class Spine:
    """Right spine of a stack element: realized nodes, then an optional dummy.

    ``nodes[0]`` is the root of the subtree the element represents; each later
    node is a right dependent of its predecessor.  An element is complete when
    it has no trailing dummy.
    """

    nodes: tuple = ()
    dummy: Dummy = None

    @property
    def is_complete(self):
        return self.dummy is None

    @property
    def head(self):
        """Root token of the element, or None for a bare unrealized head."""
        return self.nodes[0] if self.nodes else None

    def render(self):
        parts = [str(t) for t in self.nodes]
        if self.dummy is not None:
            inner = ",".join(str(t) for t in self.dummy.left)
            parts.append("x({%s})" % inner)
        return "<" + ",".join(parts) + ">"


@dataclass(frozen=True)
class Configuration:
    """Parser state: stack of spines, next buffer position, emitted arcs.

    ``starts`` records the leftmost token of each stack element (elements
    cover disjoint contiguous spans, in stack order); it is what the relaxed
    depth measure needs to know the size of the top element.
    """

    spines: tuple = ()
    buffer_pos: int = 1
    n: int = 0
    arcs: frozenset = frozenset()
    starts: tuple = ()

    @property
    def stack_depth(self):
        return len(self.spines)

    @property
    def buffer_empty(self):
        return self.buffer_pos > self.n

    @property
    def is_terminal(self):
        return (
            self.buffer_empty
            and len(self.spines) == 1
            and self.spines[0].is_complete
        )

    def top_element_size(self):
        """Token count of the top element, counting a dummy slot as one."""
        if not self.spines:
            return 0
        real = self.buffer_pos - self.starts[-1]
        return real + (0 if self.spines[-1].is_complete else 1)

    def render_stack(self):
        return "".join(s.render() for s in self.spines) or "[]"


def initial_config(n):
    return Configuration(spines=(), buffer_pos=1, n=n, arcs=frozenset(), starts=())


def _require(cond, action, reason):
    if not cond:
        raise TransitionError("%s: %s" % (action, reason))


def valid_lc_actions(config):
    """Actions whose preconditions hold in ``config``."""
    out = []
    top = config.spines[-1] if config.spines else None
    shift_phase = top is None or not top.is_complete
    if shift_phase and not config.buffer_empty:
        out.append(SHIFT)
        if top is not None:
            out.append(INSERT)
    if top is not None and top.is_complete:
        out.append(LEFT_PRED)
        out.append(RIGHT_PRED)
        if len(config.spines) >= 2 and not config.spines[-2].is_complete:
            out.append(LEFT_COMP)
            out.append(RIGHT_COMP)
    return out


def lc_apply(config, action):
    """Apply one left-corner action, checking its preconditions."""
    spines, beta, arcs, starts = (
        config.spines,
        config.buffer_pos,
        set(config.arcs),
        config.starts,
    )
    top = spines[-1] if spines else None

    if action in LC_SHIFT_ACTIONS:
        _require(not config.buffer_empty, action, "buffer is empty")
        _require(
            top is None or not top.is_complete,
            action,
            "top of stack must be incomplete (or the stack empty)",
        )
        j = beta
        if action == SHIFT:
            spines = spines + (Spine(nodes=(j,)),)
            starts = starts + (j,)
        else:
            _require(top is not None, action, "needs a dummy node to fill")
            if top.nodes:
                arcs.add((top.nodes[-1], j))
            for k in top.dummy.left:
                arcs.add((j, k))
            spines = spines[:-1] + (Spine(nodes=top.nodes + (j,)),)
        beta += 1
    elif action in LC_REDUCE_ACTIONS:
        _require(top is not None, action, "stack is empty")
        _require(top.is_complete, action, "top of stack must be complete")
        if action == LEFT_PRED:
            spines = spines[:-1] + (Spine(dummy=Dummy((top.head,))),)
        elif action == RIGHT_PRED:
            spines = spines[:-1] + (Spine(nodes=(top.head,), dummy=Dummy()),)
        else:
            _require(len(spines) >= 2, action, "needs two stack elements")
            second = spines[-2]
            _require(
                not second.is_complete,
                action,
                "second stack element must end with a dummy node",
            )
            if action == LEFT_COMP:
                merged = Spine(
                    nodes=second.nodes,
                    dummy=Dummy(second.dummy.left + (top.head,)),
                )
            else:
                if second.nodes:
                    arcs.add((second.nodes[-1], top.head))
                for k in second.dummy.left:
                    arcs.add((top.head, k))
                merged = Spine(nodes=second.nodes + (top.head,), dummy=Dummy())
            spines = spines[:-2] + (merged,)
            starts = starts[:-1]
    else:
        raise TransitionError("unknown action: %r" % (action,))

    return Configuration(
        spines=spines,
        buffer_pos=beta,
        n=config.n,
        arcs=frozenset(arcs),
        starts=starts,
    )


class _Gold:
    """Gold-arc lookups shared by the oracles."""

    def __init__(self, tree):
        self.heads = tree.heads
        self.deps = [[] for _ in range(tree.n + 1)]
        for tok in tree.tokens:
            if tok.head != 0:
                self.deps[tok.head].append(tok.index)
        for ds in self.deps:
            ds.sort()
        self.arcs = tree.arcs

    def head(self, t):
        return self.heads[t - 1]

    def remaining_deps(self, t, beta):
        """Dependents of ``t`` not yet read (positions >= beta)."""
        return [d for d in self.deps[t] if d >= beta]

    def next_dep(self, t, beta):
        rem = self.remaining_deps(t, beta)
        return rem[0] if rem else None


def lc_oracle(config, gold):
    """Return the action recovering ``gold`` from ``config``.

    The shift phase prefers Insert over Shift; the reduce phase prefers
    compositions over predictions.  ``gold`` is a ``_Gold`` index or a
    ``DepTree``.
    """
    if isinstance(gold, DepTree):
        gold = _Gold(gold)
    beta = config.buffer_pos
    top = config.spines[-1] if config.spines else None

    if top is None or not top.is_complete:
        if config.buffer_empty:
            raise TransitionError("oracle: shift phase with an empty buffer")
        j = beta
        if top is not None:
            i = top.nodes[-1] if top.nodes else None
            lam = top.dummy.left
            if i is not None:
                if (i, j) in gold.arcs and not gold.remaining_deps(j, j + 1):
                    return INSERT
            elif any((j, k) in gold.arcs for k in lam):
                return INSERT
        return SHIFT

    head = top.head
    second = config.spines[-2] if len(config.spines) >= 2 else None
    if second is not None and not second.is_complete:
        i = second.nodes[-1] if second.nodes else None
        lam = second.dummy.left
        no_pending = not gold.remaining_deps(head, beta)
        gold_head = gold.head(head)
        if i is not None:
            if no_pending and gold.next_dep(i, beta) == gold_head:
                return LEFT_COMP
            if len(gold.remaining_deps(head, beta)) == 1 and (i, head) in gold.arcs:
                return RIGHT_COMP
        else:
            if no_pending and gold_head != 0 and any(
                gold.head(k) == gold_head for k in lam
            ):
                return LEFT_COMP
            if gold.remaining_deps(head, beta) and any(
                (head, k) in gold.arcs for k in lam
            ):
                return RIGHT_COMP
    if gold.remaining_deps(head, beta):
        return RIGHT_PRED
    return LEFT_PRED


@dataclass(frozen=True)
class TraceStep:
    """One applied action: resulting depth and the phase it belongs to.

    ``top_size`` is the post-action size of the top stack element (dummy slot
    included); it is None for systems that do not track element extents.
    """

    action: str
    depth: int
    phase: str
    top_size: int = None


@dataclass(frozen=True)
class OracleTrace:
    system: str
    steps: tuple
    arcs: frozenset
    final_config: Configuration = None

    @property
    def n_actions(self):
        return len(self.steps)


def format_trace(trace):
    """Render a trace as tab-separated ``step action depth phase`` lines."""
    lines = []
    for i, step in enumerate(trace.steps, start=1):
        lines.append("%d\t%s\t%d\t%s" % (i, step.action, step.depth, step.phase))
    return "\n".join(lines)


def _phase_of(action):
    return "shift" if action in LC_SHIFT_ACTIONS else "reduce"


def run_lc_oracle(tree):
    """Replay ``tree`` with the left-corner oracle and record depths."""
    gold = _Gold(tree)
    config = initial_config(tree.n)
    steps = []
    limit = 4 * tree.n + 4
    while not config.is_terminal:
        if len(steps) >= limit:
            raise TransitionError(
                "oracle failed to terminate; is the tree projective?"
            )
        action = lc_oracle(config, gold)
        config = lc_apply(config, action)
        steps.append(
            TraceStep(
                action=action,
                depth=config.stack_depth,
                phase=_phase_of(action),
                top_size=config.top_element_size(),
            )
        )
    if config.arcs != gold.arcs:
        raise TransitionError("oracle produced wrong arcs: %s" % (config.arcs,))
    return OracleTrace(
        system=LEFT_CORNER,
        steps=tuple(steps),
        arcs=config.arcs,
        final_config=config,
    )


def run_as_oracle(tree):
    """Arc-standard oracle; depth is the raw stack size after each action."""
    gold = _Gold(tree)
    attached = set()
    stack = []
    front = 1
    arcs = set()
    steps = []

    def done(t):
        return all(d in attached for d in gold.deps[t])

    while not (front > tree.n and len(stack) <= 1):
        if len(stack) >= 2 and gold.head(stack[-2]) == stack[-1] and done(stack[-2]):
            dep = stack.pop(-2)
            arcs.add((stack[-1], dep))
            attached.add(dep)
            action = "leftArc"
        elif len(stack) >= 2 and gold.head(stack[-1]) == stack[-2] and done(stack[-1]):
            dep = stack.pop()
            arcs.add((stack[-1], dep))
            attached.add(dep)
            action = "rightArc"
        elif front <= tree.n:
            stack.append(front)
            front += 1
            action = SHIFT
        else:
            raise TransitionError("arc-standard oracle is stuck")
        phase = "shift" if action == SHIFT else "reduce"
        steps.append(TraceStep(action=action, depth=len(stack), phase=phase))
    if arcs != gold.arcs:
        raise TransitionError("arc-standard oracle produced wrong arcs")
    return OracleTrace(system=ARC_STANDARD, steps=tuple(steps), arcs=frozenset(arcs))


def run_ae_oracle(tree):
    """Arc-eager oracle; depth counts connected components.

    The depth of a configuration is the number of stack tokens not attached
    to anything, plus one when the token at the front of the buffer has
    already collected a dependent (a subtree forming in the buffer).
    """
    gold = _Gold(tree)
    attached = set()
    stack = []
    front = 1
    arcs = set()
    steps = []

    def done(t):
        return all(d in attached for d in gold.deps[t])

    def depth():
        d = sum(1 for t in stack if t not in attached)
        if front <= tree.n and any(h == front for (h, _) in arcs):
            d += 1
        return d

    while True:
        if (
            stack
            and front <= tree.n
            and stack[-1] not in attached
            and gold.head(stack[-1]) == front
            and done(stack[-1])
        ):
            dep = stack.pop()
            arcs.add((front, dep))
            attached.add(dep)
            action = "leftArc"
        elif stack and front <= tree.n and gold.head(front) == stack[-1]:
            arcs.add((stack[-1], front))
            attached.add(front)
            stack.append(front)
            front += 1
            action = "rightArc"
        elif stack and stack[-1] in attached and done(stack[-1]):
            stack.pop()
            action = "reduce"
        elif front <= tree.n:
            stack.append(front)
            front += 1
            action = SHIFT
        else:
            break
        phase = "shift" if action in (SHIFT, "rightArc") else "reduce"
        steps.append(TraceStep(action=action, depth=depth(), phase=phase))
    if arcs != gold.arcs:
        raise TransitionError("arc-eager oracle produced wrong arcs")
    return OracleTrace(system=ARC_EAGER, steps=tuple(steps), arcs=frozenset(arcs))


def run_oracle(tree, system=LEFT_CORNER):
    if system == LEFT_CORNER:
        return run_lc_oracle(tree)
    if system == ARC_STANDARD:
        return run_as_oracle(tree)
    if system == ARC_EAGER:
        return run_ae_oracle(tree)
    raise ValueError("unknown system: %r" % (system,))


def depth_re_max(trace):
    """Largest stack depth right after a reduce action (at least 1)."""
    return max((s.depth for s in trace.steps if s.phase == "reduce"), default=1)


def depth_sh_max(trace):
    """Largest stack depth right after a shift action (at least 1)."""
    return max((s.depth for s in trace.steps if s.phase == "shift"), default=1)


def relaxed_depth_re_max(trace, size_cutoff):
    """Reduce-depth maximum ignoring steps with a small top element.

    A post-reduce configuration only counts when the size of its top stack
    element (tokens plus the dummy slot) exceeds ``size_cutoff``; the measure
    floors at 1.  A cutoff of 1 reproduces :func:`depth_re_max` because a
    post-reduce top always holds at least one token and a dummy.
    """
    return max(
        (
            s.depth
            for s in trace.steps
            if s.phase == "reduce" and s.top_size is not None
            and s.top_size > size_cutoff
        ),
        default=1,
    )


def max_step_depth(trace):
    """Largest recorded depth over all steps of the trace."""
    return max((s.depth for s in trace.steps), default=0)


def postprocess_terminal(config, root_position=None):
    """Read a head vector out of a (possibly failed) terminal configuration.

    Dummy nodes are collapsed: the children of a dummy in head position are
    moved to the sentence root, the children of an internal dummy to the
    dummy's parent.  Every remaining headless token is then attached to the
    sentence root.  ``root_position`` names the token serving as the sentence
    root (conventionally the appended root marker); when None, stranded
    tokens attach to the artificial root 0 instead.
    """
    heads = {}
    for h, d in config.arcs:
        heads[d] = h
    for spine in config.spines:
        if spine.is_complete:
            continue
        parent = spine.nodes[-1] if spine.nodes else None
        for k in spine.dummy.left:
            heads[k] = parent if parent is not None else root_position
    out = []
    for t in range(1, config.n + 1):
        h = heads.get(t)
        if t == root_position:
            h = 0
        elif h is None:
            h = root_position if root_position is not None else 0
        out.append(h)
    return tuple(out)
