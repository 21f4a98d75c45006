"""Depth-coverage tables for one or more treebanks.

For every input treebank this replays the left-corner oracle on each
sentence and tabulates how many tokens and sentences stay within each
reduce-depth bound, optionally at several size cutoffs for the relaxed
measure, plus a configuration-depth histogram.

Usage:
    python scripts/coverage_tables.py en=en-train.conllu ar=ar-train.conll \
        --bounds 1,2,3,4 --relax 1,2,3 --max-len 100

Output is a single TSV on stdout with one row per (language, bound, relaxC).
"""

import argparse
import sys

from lcdep.analysis import (
    coverage_report,
    coverage_rows,
    depth_histogram,
    format_tsv,
    histogram_rows,
    prepare_corpus,
)
from lcdep.transition import LEFT_CORNER
from lcdep.treebank import parse_conll


def _int_list(text):
    return tuple(int(x) for x in text.split(",") if x)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("treebanks", nargs="+", metavar="LANG=FILE",
                    help="labelled CoNLL-X / CoNLL-U files")
    ap.add_argument("--bounds", type=_int_list, default=(1, 2, 3, 4))
    ap.add_argument("--relax", type=_int_list, default=(1,),
                    help="size cutoffs for the relaxed reduce-depth measure")
    ap.add_argument("--pos-column", type=int, default=3)
    ap.add_argument("--max-len", type=int, default=None)
    ap.add_argument("--strip-punct", action="store_true")
    ap.add_argument("--histogram", action="store_true",
                    help="also print the raw configuration-depth histogram")
    args = ap.parse_args(argv)

    rows = []
    hist_rows = []
    for spec in args.treebanks:
        lang, _, path = spec.partition("=")
        if not path:
            ap.error("treebank arguments look like LANG=FILE, got %r" % spec)
        with open(path, encoding="utf-8") as handle:
            corpus = parse_conll(handle.read(), pos_column=args.pos_column)
        prepared = prepare_corpus(
            corpus, strip_punct=args.strip_punct, max_len=args.max_len
        )
        print(
            "%s: %d sentences" % (lang, len(prepared)),
            file=sys.stderr,
        )
        for relax_c in args.relax:
            report = coverage_report(prepared, args.bounds, relax_c=relax_c)
            rows.extend(coverage_rows(lang, report, LEFT_CORNER))
        if args.histogram:
            hist_rows.extend(
                histogram_rows(lang, depth_histogram(prepared), LEFT_CORNER)
            )
    print(format_tsv(rows + hist_rows), end="")


if __name__ == "__main__":
    main()
