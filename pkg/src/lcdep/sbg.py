"""Split bilexical grammars over dependency trees.

A sentence is scored by one weighted finite-state automaton per (token, side):
the left automaton of a head emits its left dependents, the right automaton
its right dependents, both nearest-first when walked forward from an initial
state to a final state.  A distinguished root position n+1 carries a left
automaton that accepts exactly one dependent (the sentence root).

The module provides

* tag-level automata and the dependency-model-with-valence (DMV)
  instantiation, where each side has two states (no dependents yet /
  at least one) so stop decisions can condition on adjacency;
* exhaustive oracles that score a single tree or enumerate all projective
  trees (used to validate the charts);
* an O(n^3) head-split chart computing marginals, expected event counts,
  derivation counts, and Viterbi trees;
* one EM step for DMV parameters.

Weights are kept in log space throughout.
"""

import collections
import dataclasses
import math

import numpy as np

from . import hypergraph
from .exhaustive import projective_trees
from .hypergraph import NEG_INF
from .treebank import tree_from_heads

LEFT = "L"
RIGHT = "R"


def _log(p):
    return math.log(p) if p > 0.0 else NEG_INF


def _logsumexp(values):
    m = NEG_INF
    for v in values:
        if v > m:
            m = v
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(sum(math.exp(v - m) for v in values))


# ---------------------------------------------------------------------------
# parameters and tag-level automata


@dataclasses.dataclass
class DmvParams:
    """Probabilities of the dependency model with valence.

    attach[(head_tag, side)] is a distribution over dependent tags;
    stop[(head_tag, side, adjacent)] is the probability of generating no
    further dependent on that side; root is a distribution over root tags.
    """

    attach: dict
    stop: dict
    root: dict

    def tags(self):
        out = set(self.root)
        for (h, _), dist in self.attach.items():
            out.add(h)
            out.update(dist)
        return sorted(out)


def uniform_dmv_params(vocab):
    vocab = sorted(set(vocab))
    p = 1.0 / len(vocab)
    attach = {(h, s): {d: p for d in vocab} for h in vocab for s in (LEFT, RIGHT)}
    stop = {(h, s, adj): 0.5 for h in vocab for s in (LEFT, RIGHT) for adj in (True, False)}
    root = {d: p for d in vocab}
    return DmvParams(attach=attach, stop=stop, root=root)


def random_dmv_params(vocab, rng):
    """Random fully-supported parameters, for smoke and agreement tests."""
    vocab = sorted(set(vocab))

    def simplex(keys):
        raw = {k: rng.random() + 1e-3 for k in keys}
        z = sum(raw.values())
        return {k: v / z for k, v in raw.items()}

    attach = {(h, s): simplex(vocab) for h in vocab for s in (LEFT, RIGHT)}
    stop = {
        (h, s, adj): 0.05 + 0.9 * rng.random()
        for h in vocab
        for s in (LEFT, RIGHT)
        for adj in (True, False)
    }
    root = simplex(vocab)
    return DmvParams(attach=attach, stop=stop, root=root)


def dmv_to_lines(params):
    """Serialize as kind<TAB>context<TAB>decision<TAB>logprob lines."""
    lines = []
    for (h, side), dist in sorted(params.attach.items()):
        for d, p in sorted(dist.items()):
            lines.append("attach\t%s:%s\t%s\t%r" % (h, side, d, _log(p)))
    for (h, side, adj), p in sorted(params.stop.items()):
        ctx = "%s:%s:%s" % (h, side, "adj" if adj else "nonadj")
        lines.append("stop\t%s\tstop\t%r" % (ctx, _log(p)))
        lines.append("stop\t%s\tcontinue\t%r" % (ctx, _log(1.0 - p)))
    for d, p in sorted(params.root.items()):
        lines.append("root\t$\t%s\t%r" % (d, _log(p)))
    return lines


def dmv_from_lines(lines):
    attach = {}
    stop = {}
    root = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind, ctx, decision, logp = line.split("\t")
        p = math.exp(float(logp))
        if kind == "attach":
            h, side = ctx.rsplit(":", 1)
            attach.setdefault((h, side), {})[decision] = p
        elif kind == "stop":
            h, side, adj = ctx.rsplit(":", 2)
            if decision == "stop":
                stop[(h, side, adj == "adj")] = p
        elif kind == "root":
            root[decision] = p
        else:
            raise ValueError("unknown model line kind %r" % kind)
    return DmvParams(attach=attach, stop=stop, root=root)


# ---------------------------------------------------------------------------
# sentence-level automata

ROOT_STATE0 = 0
ROOT_STATE1 = 1


class SentenceAutomata:
    """Per-position weighted automata for one sentence of n tokens.

    Positions are 1-based.  Position n+1 is the distinguished root; it has a
    left automaton only, whose structure forces exactly one dependent.  A
    forward walk (initial state to final state) consumes dependents
    nearest-first: descending positions on the left side, ascending on the
    right.

    Charts never read weights from items; they emit event tuples

        (side, h, "init", q) / (side, h, "final", q) /
        (side, h, "trans", q, r, d)

    and ``event_logw`` supplies the log-weight of each.
    """

    def __init__(self, n, topology_key=None):
        self.n = n
        self.topology_key = topology_key
        self._init = {}
        self._final = {}
        self._fwd = {}
        self._rev = {}

    def add_machine(self, side, h, init, final, trans):
        """Install the automaton for (side, h).

        init/final map state -> logw; trans is an iterable of
        (q, dep_position, r, logw) forward transitions.
        """
        self._init[side, h] = dict(init)
        self._final[side, h] = dict(final)
        fwd = {}
        rev = {}
        for q, d, r, w in trans:
            fwd.setdefault((q, d), {})[r] = w
            rev.setdefault((r, d), {})[q] = w
        self._fwd[side, h] = fwd
        self._rev[side, h] = rev

    def init_states(self, side, h):
        return list(self._init[side, h].items())

    def final_states(self, side, h):
        return list(self._final[side, h].items())

    def steps(self, side, h, q, d):
        """Forward transitions from q consuming the dependent at d."""
        return list(self._fwd[side, h].get((q, d), {}).items())

    def steps_into(self, side, h, r, d):
        """States q with a forward transition q --d--> r."""
        return list(self._rev[side, h].get((r, d), {}).items())

    def event_logw(self, event):
        side, h, kind = event[0], event[1], event[2]
        if kind == "init":
            return self._init[side, h].get(event[3], NEG_INF)
        if kind == "final":
            return self._final[side, h].get(event[3], NEG_INF)
        if kind == "trans":
            q, r, d = event[3], event[4], event[5]
            return self._fwd[side, h].get((q, d), {}).get(r, NEG_INF)
        raise ValueError("unknown event %r" % (event,))

    def reweight(self, bias):
        """Copy with ``bias(h, d)`` added to every real-head transition.

        The transition structure (and hence any cached forest) is unchanged,
        so the topology key is preserved.
        """
        out = SentenceAutomata(self.n, topology_key=self.topology_key)
        out._init = {k: dict(v) for k, v in self._init.items()}
        out._final = {k: dict(v) for k, v in self._final.items()}
        for (side, h), fwd in self._fwd.items():
            trans = []
            for (q, d), row in fwd.items():
                for r, w in row.items():
                    extra = bias(h, d) if h <= self.n else 0.0
                    trans.append((q, d, r, w + extra))
            out.add_machine(
                side, h, self._init[side, h], self._final[side, h], trans
            )
        return out

    def restrict_root(self, allowed_positions):
        """Copy where root transitions outside ``allowed_positions`` carry
        zero weight.  Structure is preserved so forests stay cacheable."""
        allowed = set(allowed_positions)
        out = SentenceAutomata(self.n, topology_key=self.topology_key)
        out._init = {k: dict(v) for k, v in self._init.items()}
        out._final = {k: dict(v) for k, v in self._final.items()}
        for (side, h), fwd in self._fwd.items():
            trans = []
            for (q, d), row in fwd.items():
                for r, w in row.items():
                    if h == self.n + 1 and d not in allowed:
                        w = NEG_INF
                    trans.append((q, d, r, w))
            out.add_machine(
                side, h, self._init[side, h], self._final[side, h], trans
            )
        return out


def _add_root_machine(sent, n, root_logw):
    trans = [(ROOT_STATE0, d, ROOT_STATE1, root_logw(d)) for d in range(1, n + 1)]
    sent.add_machine(LEFT, n + 1, {ROOT_STATE0: 0.0}, {ROOT_STATE1: 0.0}, trans)


def dmv_sentence_automata(tags, params):
    """DMV automata over one sentence: two states per side, adjacency split."""
    n = len(tags)
    sent = SentenceAutomata(n, topology_key=("dmv", n))
    for h in range(1, n + 1):
        ht = tags[h - 1]
        for side in (LEFT, RIGHT):
            deps = range(1, h) if side == LEFT else range(h + 1, n + 1)
            stop_adj = params.stop[ht, side, True]
            stop_non = params.stop[ht, side, False]
            final = {0: _log(stop_adj), 1: _log(stop_non)}
            trans = []
            for d in deps:
                att = _log(params.attach[ht, side].get(tags[d - 1], 0.0))
                trans.append((0, d, 1, att + _log(1.0 - stop_adj)))
                trans.append((1, d, 1, att + _log(1.0 - stop_non)))
            sent.add_machine(side, h, {0: 0.0}, final, trans)
    _add_root_machine(sent, n, lambda d: _log(params.root.get(tags[d - 1], 0.0)))
    return sent


def weighted_sentence_automata(
    tags, attach_logw, root_logw, stop_logw=None, cont_logw=None
):
    """DMV-shaped automata with arbitrary per-position log-weights.

    attach_logw(h, d) scores attaching position d under head position h;
    stop_logw(h, side, adjacent) and cont_logw(h, side, adjacent) default to
    0.  Used for the harmonic initializer and other position-level biases.
    """
    n = len(tags)
    stop_logw = stop_logw or (lambda h, side, adj: 0.0)
    cont_logw = cont_logw or (lambda h, side, adj: 0.0)
    sent = SentenceAutomata(n, topology_key=("dmv", n))
    for h in range(1, n + 1):
        for side in (LEFT, RIGHT):
            deps = range(1, h) if side == LEFT else range(h + 1, n + 1)
            final = {0: stop_logw(h, side, True), 1: stop_logw(h, side, False)}
            trans = []
            for d in deps:
                trans.append((0, d, 1, attach_logw(h, d) + cont_logw(h, side, True)))
                trans.append((1, d, 1, attach_logw(h, d) + cont_logw(h, side, False)))
            sent.add_machine(side, h, {0: 0.0}, final, trans)
    _add_root_machine(sent, n, root_logw)
    return sent


def random_sentence_automata(n, n_states, rng):
    """Random multi-state automata over n positions, fully connected.

    Exercises the charts beyond the two-state DMV topology.
    """
    sent = SentenceAutomata(n)
    states = range(n_states)

    def w():
        return math.log(0.05 + rng.random())

    for h in range(1, n + 1):
        for side in (LEFT, RIGHT):
            deps = range(1, h) if side == LEFT else range(h + 1, n + 1)
            init = {q: w() for q in states if q == 0 or rng.random() < 0.5}
            final = {q: w() for q in states if q == n_states - 1 or rng.random() < 0.5}
            trans = []
            for d in deps:
                for q in states:
                    for r in states:
                        if rng.random() < 0.7:
                            trans.append((q, d, r, w()))
            sent.add_machine(side, h, init, final, trans)
    _add_root_machine(sent, n, lambda d: w())
    return sent


# ---------------------------------------------------------------------------
# exhaustive oracles


def _ordered_deps(heads, h, n):
    """Dependent positions of h in forward consumption order (nearest first)."""
    if h == n + 1:
        return [d + 1 for d, hd in enumerate(heads) if hd == 0]
    left = sorted((d + 1 for d, hd in enumerate(heads) if hd == h and d + 1 < h), reverse=True)
    right = sorted(d + 1 for d, hd in enumerate(heads) if hd == h and d + 1 > h)
    return left, right


def _chain_passes(sent, side, h, deps):
    """Forward/backward log masses over one automaton run consuming deps."""
    alphas = [dict(sent.init_states(side, h))]
    for d in deps:
        nxt = {}
        for q, wq in alphas[-1].items():
            for r, w in sent.steps(side, h, q, d):
                nxt[r] = np.logaddexp(nxt.get(r, NEG_INF), wq + w)
        alphas.append(nxt)
    finals = dict(sent.final_states(side, h))
    betas = [None] * (len(deps) + 1)
    betas[-1] = dict(finals)
    for k in range(len(deps) - 1, -1, -1):
        d = deps[k]
        prev = {}
        for r, wr in betas[k + 1].items():
            for q, w in sent.steps_into(side, h, r, d):
                prev[q] = np.logaddexp(prev.get(q, NEG_INF), wr + w)
        betas[k] = prev
    logw = _logsumexp(
        [wq + finals.get(q, NEG_INF) for q, wq in alphas[-1].items()]
    )
    return alphas, betas, logw


def tree_log_weight(heads, tags, sent):
    """Log-weight of one tree: the product of all its automaton runs."""
    n = len(tags)
    total = 0.0
    for h in range(1, n + 1):
        left, right = _ordered_deps(heads, h, n)
        for side, deps in ((LEFT, left), (RIGHT, right)):
            _, _, logw = _chain_passes(sent, side, h, deps)
            total += logw
            if total == NEG_INF:
                return NEG_INF
    _, _, logw = _chain_passes(sent, LEFT, n + 1, _ordered_deps(heads, n + 1, n))
    return total + logw


def tree_event_logmass(heads, tags, sent):
    """(log-weight, event -> log expected-use mass) for a single tree.

    Masses are unnormalized: dividing by the tree weight gives the expected
    number of uses of each automaton event across the tree's state paths.
    """
    n = len(tags)
    chains = []
    for h in range(1, n + 1):
        left, right = _ordered_deps(heads, h, n)
        chains.append((LEFT, h, left))
        chains.append((RIGHT, h, right))
    chains.append((LEFT, n + 1, _ordered_deps(heads, n + 1, n)))
    total = 0.0
    per_chain = []
    for side, h, deps in chains:
        alphas, betas, logw = _chain_passes(sent, side, h, deps)
        per_chain.append((side, h, deps, alphas, betas, logw))
        total += logw
    if total == NEG_INF or math.isnan(total):
        return NEG_INF, {}
    masses = {}

    def bump(event, logmass):
        if logmass == NEG_INF:
            return
        masses[event] = np.logaddexp(masses.get(event, NEG_INF), logmass)

    for side, h, deps, alphas, betas, logw in per_chain:
        rest = total - logw
        for q, wq in alphas[0].items():
            bump((side, h, "init", q), rest + wq + betas[0].get(q, NEG_INF))
        for q, wq in alphas[-1].items():
            wf = dict(sent.final_states(side, h)).get(q, NEG_INF)
            bump((side, h, "final", q), rest + wq + wf)
        for k, d in enumerate(deps):
            for q, wq in alphas[k].items():
                for r, w in sent.steps(side, h, q, d):
                    wb = betas[k + 1].get(r, NEG_INF)
                    bump((side, h, "trans", q, r, d), rest + wq + w + wb)
    return total, masses


def brute_force_marginal(tags, sent, tree_filter=None):
    """Log-sum of tree weights over all projective trees (optionally filtered)."""
    n = len(tags)
    vals = []
    for heads in projective_trees(n):
        if tree_filter is not None and not tree_filter(heads):
            continue
        vals.append(tree_log_weight(heads, tags, sent))
    return _logsumexp(vals)


def brute_force_expected_counts(tags, sent, tree_filter=None):
    """(event -> expected count, log marginal) by explicit enumeration."""
    n = len(tags)
    per_tree = []
    for heads in projective_trees(n):
        if tree_filter is not None and not tree_filter(heads):
            continue
        logw, masses = tree_event_logmass(heads, tags, sent)
        if logw > NEG_INF:
            per_tree.append((logw, masses))
    logz = _logsumexp([lw for lw, _ in per_tree])
    counts = collections.defaultdict(float)
    if logz == NEG_INF:
        return counts, logz
    for logw, masses in per_tree:
        for event, logmass in masses.items():
            counts[event] += math.exp(logmass - logz)
    return counts, logz


def brute_force_viterbi(tags, sent, tree_filter=None):
    """(best log-weight, heads) preferring the lexicographically smaller
    sorted (dependent, head) arc list on ties."""
    n = len(tags)
    best = (NEG_INF, None)
    for heads in projective_trees(n):
        if tree_filter is not None and not tree_filter(heads):
            continue
        logw = tree_log_weight(heads, tags, sent)
        if logw == NEG_INF:
            continue
        key = tuple(sorted((d + 1, h) for d, h in enumerate(heads)))
        if (
            best[1] is None
            or logw > best[0] + 1e-12
            or (logw > best[0] - 1e-12 and key < best[2])
        ):
            best = (logw, heads, key)
    return best[0], best[1]


# ---------------------------------------------------------------------------
# the O(n^3) head-split chart
#
# Item shapes (spans are inclusive, head positions 1-based, root at n+1):
#   ("LF", i, h)      finished left half of h covering i..h
#   ("LQ", q, i, h)   left half of h covering i..h, automaton in state q
#   ("LT", r, d, h)   left half extended by the arc h -> d, d's right half
#                     already attached; r is the state after consuming d
#   ("RF", h, j) / ("RQ", q, h, j) / ("RT", r, h, d)  mirror images
#
# Walking a left automaton forward consumes dependents nearest-first, so the
# chart grows left halves outward: ("LQ", q, i, h) extends to a farther
# dependent d < i.  The goal is the root's finished left half ("LF", 1, n+1).


def _eisner_expand(sent):
    n = sent.n

    def expand(item):
        kind = item[0]
        out = []
        if kind == "LF":
            _, i, h = item
            for q, _ in sent.final_states(LEFT, h):
                out.append(((("LQ", q, i, h),), ((LEFT, h, "final", q),)))
        elif kind == "LQ":
            _, q, i, h = item
            if i == h:
                if any(q == q0 for q0, _ in sent.init_states(LEFT, h)):
                    out.append(((), ((LEFT, h, "init", q),)))
            else:
                for d in range(i, h):
                    out.append(((("LF", i, d), ("LT", q, d, h)), ()))
        elif kind == "LT":
            _, r, d, h = item
            for k in range(d, h):
                for q, _ in sent.steps_into(LEFT, h, r, d):
                    out.append(
                        (
                            (("RF", d, k), ("LQ", q, k + 1, h)),
                            ((LEFT, h, "trans", q, r, d),),
                        )
                    )
        elif kind == "RF":
            _, h, j = item
            for q, _ in sent.final_states(RIGHT, h):
                out.append(((("RQ", q, h, j),), ((RIGHT, h, "final", q),)))
        elif kind == "RQ":
            _, q, h, j = item
            if j == h:
                if any(q == q0 for q0, _ in sent.init_states(RIGHT, h)):
                    out.append(((), ((RIGHT, h, "init", q),)))
            else:
                for d in range(h + 1, j + 1):
                    out.append(((("RT", q, h, d), ("RF", d, j)), ()))
        elif kind == "RT":
            _, r, h, d = item
            for k in range(h, d):
                for q, _ in sent.steps_into(RIGHT, h, r, d):
                    out.append(
                        (
                            (("RQ", q, h, k), ("LF", k + 1, d)),
                            ((RIGHT, h, "trans", q, r, d),),
                        )
                    )
        else:
            raise ValueError("unknown item %r" % (item,))
        return out

    return expand


def eisner_forest(tags, sent):
    n = len(tags)
    return hypergraph.build_forest(("LF", 1, n + 1), _eisner_expand(sent))


class Chart:
    """A built forest plus its inside values under one weighting."""

    def __init__(self, forest, inside, eventw=None):
        self.forest = forest
        self.inside = inside
        self.eventw = eventw

    def item_value(self, item):
        iid = self.forest.item_index.get(item)
        if iid is None:
            return NEG_INF
        return self.inside[iid]


def _arcs_of_edge(forest, n):
    def edge_arcs(e):
        arcs = []
        for k in forest.edge_events[e]:
            ev = forest.events[k]
            if ev[2] == "trans":
                h, d = ev[1], ev[5]
                arcs.append((d, 0 if h == n + 1 else h))
        return arcs

    return edge_arcs


def _heads_from_edges(forest, edges, n):
    heads = [None] * n
    edge_arcs = _arcs_of_edge(forest, n)
    for e in edges:
        for d, h in edge_arcs(e):
            heads[d - 1] = h
    if any(h is None for h in heads):
        raise ValueError("incomplete derivation: %r" % (heads,))
    return tuple(heads)


def eisner_inside(tags, sent, semiring="logsum", forest=None):
    """(chart, total) under the requested semiring.

    "logsum" gives the log marginal over projective trees, "count" the exact
    number of derivations, "max" the best log-weight.
    """
    if forest is None:
        forest = eisner_forest(tags, sent)
    if semiring == "count":
        counts = hypergraph.inside_count(forest)
        return Chart(forest, counts), counts[forest.goal_id]
    eventw = forest.event_weights(sent.event_logw)
    if semiring == "logsum":
        inside = hypergraph.inside_logsum(forest, eventw)
        return Chart(forest, inside, eventw), float(inside[forest.goal_id])
    if semiring == "max":
        scores, best = hypergraph.inside_max(
            forest, eventw, _arcs_of_edge(forest, len(tags))
        )
        chart = Chart(forest, scores, eventw)
        chart.best_edge = best
        return chart, float(scores[forest.goal_id])
    raise ValueError("unknown semiring %r" % semiring)


def eisner_expected_counts(tags, sent, forest=None):
    """(event -> expected count, log marginal) via inside-outside."""
    if forest is None:
        forest = eisner_forest(tags, sent)
    eventw = forest.event_weights(sent.event_logw)
    logz, post = hypergraph.event_posteriors(forest, eventw)
    counts = {
        forest.events[k]: post[k] for k in range(len(forest.events)) if post[k]
    }
    return counts, float(logz)


def eisner_viterbi(tags, sent, forest=None):
    """Best projective tree as a DepTree; ties prefer the arc list whose
    sorted (dependent, head) pairs are lexicographically smaller."""
    chart, score = eisner_inside(tags, sent, semiring="max", forest=forest)
    if score == NEG_INF:
        raise ValueError("no derivation has nonzero weight")
    edges = hypergraph.backtrace(chart.forest, chart.best_edge)
    heads = _heads_from_edges(chart.forest, edges, len(tags))
    return tree_from_heads(heads, tags=tags)


# ---------------------------------------------------------------------------
# DMV expectations and EM


@dataclasses.dataclass
class DmvCounts:
    attach: dict
    stop: dict
    cont: dict
    root: dict

    @staticmethod
    def zero():
        return DmvCounts(
            attach=collections.defaultdict(float),
            stop=collections.defaultdict(float),
            cont=collections.defaultdict(float),
            root=collections.defaultdict(float),
        )

    def merge(self, other):
        for key, c in other.attach.items():
            self.attach[key] += c
        for key, c in other.stop.items():
            self.stop[key] += c
        for key, c in other.cont.items():
            self.cont[key] += c
        for key, c in other.root.items():
            self.root[key] += c
        return self


def dmv_counts_from_events(event_counts, tags):
    """Convert position-level automaton event counts to DMV decision counts.

    Transitions of real heads are attachments (and continue decisions, with
    adjacency read off the source state); final weights are stop decisions.
    Root-automaton transitions are root choices; its init/final carry no
    probability mass and are ignored.
    """
    n = len(tags)
    out = DmvCounts.zero()
    for event, c in event_counts.items():
        side, h, kind = event[0], event[1], event[2]
        if h == n + 1:
            if kind == "trans":
                out.root[tags[event[5] - 1]] += c
            continue
        ht = tags[h - 1]
        if kind == "trans":
            q, _, d = event[3], event[4], event[5]
            out.attach[ht, side, tags[d - 1]] += c
            out.cont[ht, side, q == 0] += c
        elif kind == "final":
            out.stop[ht, side, event[3] == 0] += c
    return out


def dmv_params_from_counts(counts, old_params):
    """Normalize counts into probabilities, keeping old values where a
    context was never used."""
    attach = {k: dict(v) for k, v in old_params.attach.items()}
    totals = collections.defaultdict(float)
    for (h, side, d), c in counts.attach.items():
        totals[h, side] += c
    for (h, side), z in totals.items():
        if z > 0:
            attach[h, side] = {
                d: counts.attach.get((h, side, d), 0.0) / z
                for d in old_params.attach[h, side]
            }
    stop = dict(old_params.stop)
    contexts = set(counts.stop) | set(counts.cont)
    for h, side, adj in contexts:
        s = counts.stop.get((h, side, adj), 0.0)
        g = counts.cont.get((h, side, adj), 0.0)
        if s + g > 0:
            stop[h, side, adj] = s / (s + g)
    root = dict(old_params.root)
    z = sum(counts.root.values())
    if z > 0:
        root = {d: counts.root.get(d, 0.0) / z for d in old_params.root}
    return DmvParams(attach=attach, stop=stop, root=root)


def _tag_sequences(corpus):
    for item in corpus:
        if hasattr(item, "tags"):
            yield item.tags
        else:
            yield tuple(item)


def em_step(corpus, params):
    """One EM iteration of the DMV.

    Returns (new params, corpus log-likelihood of the *input* params).
    Iterating cannot decrease the returned log-likelihood.
    """
    total = DmvCounts.zero()
    loglik = 0.0
    for tags in _tag_sequences(corpus):
        sent = dmv_sentence_automata(tags, params)
        counts, logz = eisner_expected_counts(tags, sent)
        loglik += logz
        total.merge(dmv_counts_from_events(counts, tags))
    return dmv_params_from_counts(total, params), loglik
