"""Supervised transition-based parsing.

Structured perceptron (max-violation updates, averaged weights) over beam
search for three transition systems: the dummy-node left-corner system (with
a full and a lookahead-limited feature set), arc-standard, and arc-eager.
Decoding can bound the stack depth, either on every configuration ("raw") or
only after reduce actions ("depthRe", which tolerates the transient element
a shift pushes).
"""

import dataclasses
import random
from concurrent import futures

from . import transition
from .transition import (
    ARC_EAGER,
    ARC_STANDARD,
    INSERT,
    LC_REDUCE_ACTIONS,
    LEFT_CORNER,
    SHIFT,
    TransitionError,
    initial_config,
    lc_apply,
    postprocess_terminal,
    run_ae_oracle,
    run_as_oracle,
    run_lc_oracle,
    valid_lc_actions,
)
from .treebank import tree_from_heads

NULL = "-NULL-"

RAW = "raw"
DEPTH_RE = "depthRe"

FULL = "full"
LIMITED = "limited"

# Templates over elementary addresses: stack elements expose the dummy's
# parent chain (p, gp, gg) and the dummy's two leftmost children (l, l2);
# the buffer-view addresses expose the token (or completed subtree root)
# itself plus its leftmost/rightmost children (l, r).  In reduce mode the
# completed element on top of the stack is addressed as q0 and the elements
# below it shift to s0/s1.  A component without a .w/.t leaf reads the tag.
_SHARED_TEMPLATES = (
    "s0.p.w", "s0.p.t", "s0.l.w", "s0.l.t",
    "s1.p.w", "s1.p.t", "s1.l.w", "s1.l.t",
    "s0.p.w s0.p.t", "s0.l.w s0.l.t", "s1.p.w s1.p.t", "s1.l.w s1.l.t",
    "q0.w", "q0.t", "q0.w q0.t",
    "s0.p.w s0.l.w", "s0.p.t s0.l.t",
    "s0.p.w s1.p.w", "s0.l.w s1.l.w", "s0.p.t s1.p.t", "s0.l.t s1.l.t",
    "s0.p.w q0.w", "s0.l.w q0.w", "s0.p.t q0.t", "s0.l.t q0.t",
    "s0.p.w q0.w q0.p", "s0.p.w q0.w s0.p.t", "s0.l.w q0.w s0.l.t",
    "s0.p.w s0.p.t q0.t", "s0.l.w s0.l.t q0.t",
    "q0.t q0.l.t q0.r.t", "q0.w q0.l.t q0.r.t",
    "s0.p.t s0.gp.t s0.gg.t", "s0.p.t s0.gp.t s0.l.t",
    "s0.p.t s0.l.t s0.l2.t", "s0.p.t s0.gp.t q0.t",
    "s0.p.t s0.l.t q0.t", "s0.p.w s0.l.t q0.t", "s0.p.t s0.l.w q0.t",
    "s0.l.t s0.l2.p q0.t", "s0.l.t s0.l2.t q0.t",
    "s0.p.t q0.t q0.l.t", "s0.p.t q0.t q0.r.t",
    "s1.p.t s0.p.t s0.l.t", "s1.p.t s0.l.t q0.t", "s1.l.t s0.l.t q0.t",
    "s1.l.t s0.p.t q0.p",
)

# the lookahead templates dropped from the limited set
_ADDITIONAL_TEMPLATES = (
    "q0.t q1.t", "q0.t q1.t q2.t",
    "s0.p.t q0.p q1.p q2.p", "s0.l.t q0.t q1.t q2.t",
    "s0.p.w q0.t q1.t", "s0.p.t q0.t q1.t",
    "s0.l.w q0.t q1.t", "s0.l.t q0.t q1.t",
)


def _parse_component(comp):
    parts = comp.split(".")
    if len(parts) == 2:
        addr, leaf = parts
        if leaf in ("w", "t"):
            return (addr, "", leaf)
        return (addr, leaf, "t")
    addr, role, leaf = parts
    return (addr, role, leaf)


def _compile(templates):
    return tuple(
        tuple(_parse_component(c) for c in tmpl.split()) for tmpl in templates
    )

_SHARED = _compile(_SHARED_TEMPLATES)
_ADDITIONAL = _compile(_ADDITIONAL_TEMPLATES)


def lc_templates(feature_set):
    if feature_set == LIMITED:
        return _SHARED
    if feature_set == FULL:
        return _SHARED + _ADDITIONAL
    raise ValueError("unknown feature set %r" % feature_set)


def _token_view(tok, forms, tags):
    if tok is None or not (1 <= tok <= len(forms)):
        return {}
    return {("", "w"): forms[tok - 1], ("", "t"): tags[tok - 1]}


def _incomplete_view(spine, forms, tags):
    view = {}

    def put(role, tok):
        view[role, "w"] = forms[tok - 1]
        view[role, "t"] = tags[tok - 1]

    nodes = spine.nodes
    if len(nodes) >= 1:
        put("p", nodes[-1])
    if len(nodes) >= 2:
        put("gp", nodes[-2])
    if len(nodes) >= 3:
        put("gg", nodes[-3])
    left = spine.dummy.left
    if len(left) >= 1:
        put("l", left[0])
    if len(left) >= 2:
        put("l2", left[1])
    return view


def _complete_view(spine, arcs, forms, tags):
    root = spine.nodes[0]
    view = {("", "w"): forms[root - 1], ("", "t"): tags[root - 1]}
    children = sorted(d for h, d in arcs if h == root)
    if children:
        view["l", "w"] = forms[children[0] - 1]
        view["l", "t"] = tags[children[0] - 1]
        view["r", "w"] = forms[children[-1] - 1]
        view["r", "t"] = tags[children[-1] - 1]
    if len(children) >= 2:
        view["l2", "w"] = forms[children[1] - 1]
        view["l2", "t"] = tags[children[1] - 1]
    return view


def extract_lc_features(config, forms, tags, feature_set=FULL):
    """Feature strings (action not yet conjoined) for one configuration.

    Absent addresses and roles contribute a NULL placeholder rather than
    suppressing the template.
    """
    spines = config.spines
    reduce_mode = bool(spines) and spines[-1].is_complete
    views = {}
    if reduce_mode:
        views["q0"] = _complete_view(spines[-1], config.arcs, forms, tags)
        stack_below = spines[:-1]
        buffer_from = config.buffer_pos
    else:
        views["q0"] = _token_view(
            config.buffer_pos if not config.buffer_empty else None, forms, tags
        )
        stack_below = spines
        buffer_from = config.buffer_pos + 1
    if len(stack_below) >= 1:
        views["s0"] = _incomplete_view(stack_below[-1], forms, tags)
    if len(stack_below) >= 2:
        views["s1"] = _incomplete_view(stack_below[-2], forms, tags)
    views.setdefault("q1", _token_view(buffer_from, forms, tags))
    views.setdefault("q2", _token_view(buffer_from + 1, forms, tags))

    feats = []
    for idx, template in enumerate(lc_templates(feature_set)):
        vals = []
        for addr, role, leaf in template:
            view = views.get(addr)
            vals.append(view.get((role, leaf), NULL) if view else NULL)
        feats.append("%d=%s" % (idx, "|".join(vals)))
    return feats


# ---------------------------------------------------------------------------
# transition systems behind one decoding interface


class _LcSystem:
    name = LEFT_CORNER

    def __init__(self, feature_set=FULL):
        self.feature_set = feature_set

    def initial(self, n):
        return initial_config(n)

    def valid(self, state):
        return valid_lc_actions(state)

    def apply(self, state, action):
        return lc_apply(state, action)

    def is_terminal(self, state):
        return state.is_terminal

    def depth_ok(self, state, action, bound, measure, relax_c=1):
        if bound is None:
            return True
        if measure == RAW:
            return state.stack_depth <= bound
        if action in LC_REDUCE_ACTIONS:
            if relax_c > 1 and state.top_element_size() <= relax_c:
                return True
            return state.stack_depth <= bound
        return True

    def features(self, state, forms, tags):
        return extract_lc_features(state, forms, tags, self.feature_set)

    def gold_actions(self, tree):
        return [s.action for s in run_lc_oracle(tree).steps]

    def read_heads(self, state, n):
        return postprocess_terminal(state)


@dataclasses.dataclass(frozen=True)
class _FlatState:
    """Stack-of-tokens state shared by arc-standard and arc-eager."""

    stack: tuple
    front: int
    n: int
    arcs: frozenset
    attached: frozenset = frozenset()


def _flat_children(state, tok):
    return sorted(d for h, d in state.arcs if h == tok)


def _flat_wt(tok, forms, tags):
    if tok is None or not (1 <= tok <= len(forms)):
        return NULL, NULL
    return forms[tok - 1], tags[tok - 1]


class _AsSystem:
    name = ARC_STANDARD

    def initial(self, n):
        return _FlatState(stack=(), front=1, n=n, arcs=frozenset())

    def valid(self, state):
        out = []
        if state.front <= state.n:
            out.append(SHIFT)
        if len(state.stack) >= 2:
            out.append("leftArc")
            out.append("rightArc")
        return out

    def apply(self, state, action):
        if action == SHIFT:
            return dataclasses.replace(
                state, stack=state.stack + (state.front,), front=state.front + 1
            )
        if action == "leftArc":  # second-from-top depends on top
            dep, head = state.stack[-2], state.stack[-1]
        elif action == "rightArc":
            dep, head = state.stack[-1], state.stack[-2]
        else:
            raise TransitionError("unknown action %r" % action)
        stack = tuple(t for t in state.stack if t != dep)
        return dataclasses.replace(
            state, stack=stack, arcs=state.arcs | {(head, dep)}
        )

    def is_terminal(self, state):
        return state.front > state.n and len(state.stack) <= 1

    def depth_ok(self, state, action, bound, measure, relax_c=1):
        return bound is None or len(state.stack) <= bound

    def features(self, state, forms, tags):
        s0 = state.stack[-1] if len(state.stack) >= 1 else None
        s1 = state.stack[-2] if len(state.stack) >= 2 else None
        q = [
            state.front + k if state.front + k <= state.n else None
            for k in range(3)
        ]
        s0w, s0t = _flat_wt(s0, forms, tags)
        s1w, s1t = _flat_wt(s1, forms, tags)
        q0w, q0t = _flat_wt(q[0], forms, tags)
        _, q1t = _flat_wt(q[1], forms, tags)
        _, q2t = _flat_wt(q[2], forms, tags)

        def side_tags(tok):
            kids = _flat_children(state, tok) if tok else []
            lt = tags[kids[0] - 1] if kids else NULL
            rt = tags[kids[-1] - 1] if kids else NULL
            return lt, rt

        s0lt, s0rt = side_tags(s0)
        s1lt, s1rt = side_tags(s1)
        pieces = [
            ("s0w", s0w), ("s0t", s0t), ("s0wt", s0w + "|" + s0t),
            ("s1w", s1w), ("s1t", s1t), ("s1wt", s1w + "|" + s1t),
            ("q0w", q0w), ("q0t", q0t), ("q0wt", q0w + "|" + q0t),
            ("s1w_s0w", s1w + "|" + s0w), ("s1t_s0t", s1t + "|" + s0t),
            ("s0t_q0t", s0t + "|" + q0t),
            ("s1t_s0t_q0t", "|".join((s1t, s0t, q0t))),
            ("s1t_s0t_s0lt", "|".join((s1t, s0t, s0lt))),
            ("s1t_s0t_s0rt", "|".join((s1t, s0t, s0rt))),
            ("s1t_s1lt_s0t", "|".join((s1t, s1lt, s0t))),
            ("s1t_s1rt_s0t", "|".join((s1t, s1rt, s0t))),
            ("s0t_q0t_q1t", "|".join((s0t, q0t, q1t))),
            ("q0t_q1t_q2t", "|".join((q0t, q1t, q2t))),
        ]
        return ["%s=%s" % kv for kv in pieces]

    def gold_actions(self, tree):
        return [s.action for s in run_as_oracle(tree).steps]

    def read_heads(self, state, n):
        heads = {d: h for h, d in state.arcs}
        return tuple(heads.get(t, 0) for t in range(1, n + 1))


class _AeSystem:
    name = ARC_EAGER

    def initial(self, n):
        return _FlatState(stack=(), front=1, n=n, arcs=frozenset())

    def valid(self, state):
        out = []
        s0 = state.stack[-1] if state.stack else None
        if state.front <= state.n:
            out.append(SHIFT)
            if s0 is not None:
                out.append("rightArc")
                if s0 not in state.attached:
                    out.append("leftArc")
        if s0 is not None and s0 in state.attached:
            out.append("reduce")
        return out

    def apply(self, state, action):
        if action == SHIFT:
            return dataclasses.replace(
                state, stack=state.stack + (state.front,), front=state.front + 1
            )
        if action == "leftArc":
            dep = state.stack[-1]
            return dataclasses.replace(
                state,
                stack=state.stack[:-1],
                arcs=state.arcs | {(state.front, dep)},
                attached=state.attached | {dep},
            )
        if action == "rightArc":
            dep = state.front
            return dataclasses.replace(
                state,
                stack=state.stack + (dep,),
                front=state.front + 1,
                arcs=state.arcs | {(state.stack[-1], dep)},
                attached=state.attached | {dep},
            )
        if action == "reduce":
            return dataclasses.replace(state, stack=state.stack[:-1])
        raise TransitionError("unknown action %r" % action)

    def is_terminal(self, state):
        return state.front > state.n

    def _depth(self, state):
        d = sum(1 for t in state.stack if t not in state.attached)
        if state.front <= state.n and any(h == state.front for h, _ in state.arcs):
            d += 1
        return d

    def depth_ok(self, state, action, bound, measure, relax_c=1):
        return bound is None or self._depth(state) <= bound

    def features(self, state, forms, tags):
        s0 = state.stack[-1] if state.stack else None
        q = [
            state.front + k if state.front + k <= state.n else None
            for k in range(3)
        ]
        s0w, s0t = _flat_wt(s0, forms, tags)
        q0w, q0t = _flat_wt(q[0], forms, tags)
        q1w, q1t = _flat_wt(q[1], forms, tags)
        _, q2t = _flat_wt(q[2], forms, tags)
        heads = {d: h for h, d in state.arcs}
        s0h = heads.get(s0) if s0 else None
        _, s0ht = _flat_wt(s0h, forms, tags)
        s0kids = _flat_children(state, s0) if s0 else []
        s0lt = tags[s0kids[0] - 1] if s0kids else NULL
        s0rt = tags[s0kids[-1] - 1] if s0kids else NULL
        q0kids = _flat_children(state, q[0]) if q[0] else []
        q0lt = tags[q0kids[0] - 1] if q0kids else NULL
        pieces = [
            ("s0w", s0w), ("s0t", s0t), ("s0wt", s0w + "|" + s0t),
            ("q0w", q0w), ("q0t", q0t), ("q0wt", q0w + "|" + q0t),
            ("q1w", q1w), ("q1t", q1t), ("q2t", q2t),
            ("s0w_q0w", s0w + "|" + q0w), ("s0t_q0t", s0t + "|" + q0t),
            ("s0w_q0t", s0w + "|" + q0t), ("s0t_q0w", s0t + "|" + q0w),
            ("q0t_q1t", q0t + "|" + q1t),
            ("q0t_q1t_q2t", "|".join((q0t, q1t, q2t))),
            ("s0t_q0t_q1t", "|".join((s0t, q0t, q1t))),
            ("s0ht_s0t", s0ht + "|" + s0t),
            ("s0t_s0lt", s0t + "|" + s0lt), ("s0t_s0rt", s0t + "|" + s0rt),
            ("q0t_q0lt", q0t + "|" + q0lt),
        ]
        return ["%s=%s" % kv for kv in pieces]

    def gold_actions(self, tree):
        return [s.action for s in run_ae_oracle(tree).steps]

    def read_heads(self, state, n):
        heads = {d: h for h, d in state.arcs}
        return tuple(heads.get(t, 0) for t in range(1, n + 1))


def _system(name, feature_set=FULL):
    if name == LEFT_CORNER:
        return _LcSystem(feature_set)
    if name == ARC_STANDARD:
        return _AsSystem()
    if name == ARC_EAGER:
        return _AeSystem()
    raise ValueError("unknown system %r" % name)


# ---------------------------------------------------------------------------
# beam search


@dataclasses.dataclass
class BeamState:
    state: object
    score: float
    actions: tuple
    parent: object = None
    step_feats: tuple = ()

    def feature_log(self):
        """All conjoined features on the path to this state."""
        out = []
        node = self
        while node is not None:
            out.extend(node.step_feats)
            node = node.parent
        return out


def _single_rooted(heads):
    root = None
    out = list(heads)
    for i, h in enumerate(out):
        if h == 0:
            if root is None:
                root = i + 1
            else:
                out[i] = root
    if root is None:
        out[0] = 0
    return tuple(out)


def _score(weights, feats, action):
    return sum(weights.get(f + ">" + action, 0.0) for f in feats)


def _beam_run(sys_, weights, forms, tags, beam_size, depth_bound, depth_measure,
              relax_c=1, record=None):
    """Run beam search; returns (best final or None, best partial).

    ``record`` (a list, when given) receives the beam's best cumulative
    score after every round, which training uses to find violations.
    """
    n = len(forms)
    beam = [BeamState(sys_.initial(n), 0.0, ())]
    finals = []
    best_partial = beam[0]
    for _ in range(4 * n + 8):
        expansions = []
        for st in beam:
            if sys_.is_terminal(st.state):
                finals.append(st)
                continue
            base = sys_.features(st.state, forms, tags)
            for action in sys_.valid(st.state):
                new_state = sys_.apply(st.state, action)
                if not sys_.depth_ok(
                    new_state, action, depth_bound, depth_measure, relax_c
                ):
                    continue
                expansions.append(
                    BeamState(
                        new_state,
                        st.score + _score(weights, base, action),
                        st.actions + (action,),
                        parent=st,
                        step_feats=tuple(f + ">" + action for f in base),
                    )
                )
        if not expansions:
            break
        expansions.sort(key=lambda s: (-s.score, s.actions))
        beam = expansions[:beam_size]
        if record is not None:
            record.append(beam[0])
        best_partial = min(
            [best_partial, beam[0]],
            key=lambda s: (-len(s.actions), -s.score, s.actions),
        )
    finals.sort(key=lambda s: (-s.score, s.actions))
    best_final = finals[0] if finals else None
    return best_final, best_partial


def beam_decode(sentence, weights, beam_size=8, depth_bound=None,
                depth_measure=RAW, system=LEFT_CORNER, feature_set=FULL,
                relax_c=1):
    """Highest-scoring parse within the beam as a DepTree.

    ``sentence`` is a DepTree (gold heads ignored) or a (forms, tags) pair.
    Equal scores break toward the lexicographically smaller action-name
    sequence, so zero weights give a deterministic parse.  When the depth
    bound kills every completion, the best partial state is repaired into a
    tree (headless tokens attach to the first root).
    """
    if hasattr(sentence, "forms"):
        forms, tags = list(sentence.forms), list(sentence.tags)
    else:
        forms, tags = list(sentence[0]), list(sentence[1])
    n = len(forms)
    if n == 0:
        return tree_from_heads(())
    sys_ = _system(system, feature_set)
    best_final, best_partial = _beam_run(
        sys_, weights, forms, tags, beam_size, depth_bound, depth_measure,
        relax_c,
    )
    chosen = best_final if best_final is not None else best_partial
    heads = _single_rooted(sys_.read_heads(chosen.state, n))
    return tree_from_heads(heads, tags=tags, forms=forms)


# ---------------------------------------------------------------------------
# training


@dataclasses.dataclass
class ParserModel:
    system: str
    feature_set: str
    beam_size: int
    weights: dict          # averaged
    final_weights: dict
    n_updates: int
    snapshots: list = None


def _gold_path(sys_, tree, weights, forms, tags):
    """Replay the oracle actions, scoring each prefix; returns the list of
    (cumulative score, conjoined features of the step, action)."""
    state = sys_.initial(tree.n)
    score = 0.0
    path = []
    for action in sys_.gold_actions(tree):
        base = sys_.features(state, forms, tags)
        score += _score(weights, base, action)
        path.append((score, tuple(f + ">" + action for f in base), action))
        state = sys_.apply(state, action)
    return path


def train_perceptron(corpus, system=LEFT_CORNER, feature_set=FULL, beam_size=8,
                     epochs=5, seed=0, keep_snapshots=False):
    """Max-violation structured perceptron with weight averaging.

    Training decodes without a depth bound.  For every sentence whose beam
    best differs from the gold action sequence, the update happens at the
    prefix length where the beam best outscores the gold prefix by the most.
    The returned weights are the arithmetic mean of the weight-vector
    snapshots taken after every sentence visit (every update opportunity),
    so once updates stop the mean converges toward the final vector.
    """
    corpus = list(corpus)
    sys_ = _system(system, feature_set)
    rng = random.Random(seed)
    weights = {}
    totals = {}   # lazily accumulated snapshot sums
    stamp = {}    # visit at which the current value of a key took effect
    visit = 0
    n_updates = 0
    snapshots = [] if keep_snapshots else None
    for _ in range(epochs):
        order = list(range(len(corpus)))
        rng.shuffle(order)
        for idx in order:
            visit += 1
            tree = corpus[idx]
            forms, tags = list(tree.forms), list(tree.tags)
            gold = _gold_path(sys_, tree, weights, forms, tags)
            record = []
            best_final, _ = _beam_run(
                sys_, weights, forms, tags, beam_size, None, RAW, record=record
            )
            gold_actions = [a for _, _, a in gold]
            horizon = min(len(gold), len(record))
            correct = best_final is not None and list(
                best_final.actions
            ) == gold_actions
            if not correct and horizon > 0:
                t_star = max(
                    range(horizon),
                    key=lambda t: (record[t].score - gold[t][0], t),
                )
                delta = {}
                for _, fs, _ in gold[: t_star + 1]:
                    for f in fs:
                        delta[f] = delta.get(f, 0) + 1
                for f in record[t_star].feature_log():
                    delta[f] = delta.get(f, 0) - 1
                for f, d in delta.items():
                    if d == 0:
                        continue
                    old = weights.get(f, 0.0)
                    totals[f] = totals.get(f, 0.0) + old * (
                        visit - stamp.get(f, visit)
                    )
                    stamp[f] = visit
                    new = old + d
                    if new == 0.0:
                        weights.pop(f, None)
                    else:
                        weights[f] = new
                n_updates += 1
            if snapshots is not None:
                snapshots.append(dict(weights))
    for f, w in weights.items():
        totals[f] = totals.get(f, 0.0) + w * (visit - stamp.get(f, visit) + 1)
    averaged = (
        {k: v / visit for k, v in totals.items() if v != 0.0} if visit else {}
    )
    return ParserModel(
        system=system,
        feature_set=feature_set if system == LEFT_CORNER else "",
        beam_size=beam_size,
        weights=averaged,
        final_weights=weights,
        n_updates=n_updates,
        snapshots=snapshots,
    )


def decode_corpus(corpus, model, beam_size=None, depth_bound=None,
                  depth_measure=RAW, relax_c=1, jobs=1):
    """Parse every sentence with the trained model; parallel over sentences
    when jobs > 1 (decoding is read-only)."""
    beam_size = beam_size or model.beam_size
    args = [
        (tree, model, beam_size, depth_bound, depth_measure, relax_c)
        for tree in corpus
    ]
    if jobs <= 1 or len(args) < 2 * jobs:
        return [_decode_one(a) for a in args]
    with futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_decode_one, args))


def _decode_one(arg):
    tree, model, beam_size, depth_bound, depth_measure, relax_c = arg
    return beam_decode(
        tree,
        model.weights,
        beam_size=beam_size,
        depth_bound=depth_bound,
        depth_measure=depth_measure,
        system=model.system,
        feature_set=model.feature_set or FULL,
        relax_c=relax_c,
    )


# ---------------------------------------------------------------------------
# model files (same layout as the grammar-induction model file)


def parser_to_lines(model):
    lines = ["# perceptron-parser v1"]
    lines.append("# system: %s" % model.system)
    lines.append("# feature-set: %s" % (model.feature_set or "-"))
    lines.append("# beam: %d" % model.beam_size)
    for key in sorted(model.weights):
        lines.append("%s\t%.17g" % (key, model.weights[key]))
    return lines


def parser_from_lines(lines):
    system = LEFT_CORNER
    feature_set = FULL
    beam = 8
    weights = {}
    for line in lines:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# system:"):
                system = line.split(":", 1)[1].strip()
            elif line.startswith("# feature-set:"):
                val = line.split(":", 1)[1].strip()
                feature_set = val if val != "-" else ""
            elif line.startswith("# beam:"):
                beam = int(line.split(":", 1)[1])
            continue
        key, w = line.rsplit("\t", 1)
        weights[key] = float(w)
    return ParserModel(
        system=system,
        feature_set=feature_set,
        beam_size=beam,
        weights=weights,
        final_weights=dict(weights),
        n_updates=0,
    )
