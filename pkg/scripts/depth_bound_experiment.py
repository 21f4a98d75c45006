"""Supervised parsing accuracy under stack-depth bounds.

Trains a beam-search perceptron for each requested transition system on a
training treebank, then decodes the test treebank repeatedly while capping
the stack depth, to show how much accuracy each system loses when its
memory is restricted.  The left-corner system is bounded on its post-reduce
depth (optionally relaxed by a size cutoff); the other systems on their raw
stack depth.

Usage:
    python scripts/depth_bound_experiment.py train.conllu test.conllu \
        --systems left-corner,arc-standard,arc-eager --bounds 1,2,3,none
"""

import argparse

from lcdep import supervised
from lcdep.induction import evaluate_uas
from lcdep.transition import ARC_EAGER, ARC_STANDARD, LEFT_CORNER
from lcdep.treebank import parse_conll, projectivize

SYSTEMS = {
    "left-corner": LEFT_CORNER,
    "arc-standard": ARC_STANDARD,
    "arc-eager": ARC_EAGER,
}


def _bounds(text):
    return tuple(None if x == "none" else int(x) for x in text.split(",") if x)


def _load(path, pos_column, max_len):
    with open(path, encoding="utf-8") as handle:
        corpus = parse_conll(handle.read(), pos_column=pos_column,
                             max_len=max_len)
    return [projectivize(tree) for tree in corpus]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("train")
    ap.add_argument("test")
    ap.add_argument("--systems", default="left-corner,arc-standard")
    ap.add_argument("--bounds", type=_bounds, default=(1, 2, 3, None))
    ap.add_argument("--relax-c", type=int, default=1,
                    help="size cutoff for the left-corner reduce-depth bound")
    ap.add_argument("--features", default=supervised.FULL,
                    choices=(supervised.FULL, supervised.LIMITED))
    ap.add_argument("--beam", type=int, default=8)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pos-column", type=int, default=3)
    ap.add_argument("--max-len", type=int, default=None)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    train = _load(args.train, args.pos_column, args.max_len)
    test = _load(args.test, args.pos_column, args.max_len)
    names = [s for s in args.systems.split(",") if s]
    unknown = [s for s in names if s not in SYSTEMS]
    if unknown:
        ap.error("unknown systems: %s" % ", ".join(unknown))

    header = ["system"] + [
        "none" if b is None else "<=%d" % b for b in args.bounds
    ]
    print("\t".join(header))
    for name in names:
        system = SYSTEMS[name]
        feature_set = args.features if system == LEFT_CORNER else supervised.FULL
        model = supervised.train_perceptron(
            train,
            system=system,
            feature_set=feature_set,
            beam_size=args.beam,
            epochs=args.epochs,
            seed=args.seed,
        )
        measure = (
            supervised.DEPTH_RE if system == LEFT_CORNER else supervised.RAW
        )
        cells = []
        for bound in args.bounds:
            preds = supervised.decode_corpus(
                test,
                model,
                depth_bound=bound,
                depth_measure=measure,
                relax_c=args.relax_c if system == LEFT_CORNER else 1,
                jobs=args.jobs,
            )
            cells.append("%.1f" % evaluate_uas(preds, test))
        print("\t".join([name] + cells))


if __name__ == "__main__":
    main()
