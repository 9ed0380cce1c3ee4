#!/usr/bin/env python3
"""Generate small synthetic corpora for smoke runs and demos.

Three layouts:

  pi   sentence bank (CoNLL-U) plus labeled sentence pairs, half of
       them paraphrases (active/passive twins)
  re   relation-labeled sentences with entity markers, bracketed
       constituency parses, and clustered word vectors
  xl   like re, but the held-out split is pseudo-translated and a
       bilingual dictionary maps its words back to the training side

The data is deterministic for a given seed, so artifact diffs across
runs mean a code change, not corpus noise.
"""

import argparse
import sys

from udkernels.synthetic import write_crosslingual_re, write_pi_corpus, write_re_corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=("pi", "re", "xl"), help="corpus layout")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument(
        "--size",
        type=int,
        default=None,
        help="pairs (pi) or sentences per relation (re/xl); defaults 40 / 20",
    )
    parser.add_argument(
        "--test-fraction", type=float, default=0.25, help="share held out for testing"
    )
    args = parser.parse_args(argv)

    if args.task == "pi":
        paths = write_pi_corpus(
            args.out,
            n_pairs=args.size or 40,
            seed=args.seed,
            test_fraction=args.test_fraction,
        )
    else:
        write = write_re_corpus if args.task == "re" else write_crosslingual_re
        paths = write(
            args.out,
            n_per_class=args.size or 20,
            seed=args.seed,
            test_fraction=args.test_fraction,
        )
    for name in sorted(paths):
        print(f"{name}\t{paths[name]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
