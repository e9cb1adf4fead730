#!/usr/bin/env python3
"""Build a seeded random embedding for every entity in a gold standard's splits.

Components are independent standard-normal draws.  Evaluating such an
embedding exercises the null behaviour of the protocol: accuracies should
hover around chance and survive the Bonferroni screen.
"""

import argparse
import sys

from kgcbench.evaluate import random_embedding, write_embeddings
from kgcbench.goldstandard import discover_cases


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("gold_dir", help="gold-standard version directory")
    parser.add_argument("--out", required=True, help="embedding file to write")
    parser.add_argument("--dimension", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.dimension < 1:
        parser.error("--dimension must be >= 1")
    cases = discover_cases(args.gold_dir)
    if not cases:
        print(f"error: no gold-standard cases under {args.gold_dir}", file=sys.stderr)
        return 1
    uris = sorted(
        {uri for case in cases for uri, _ in case.train}
        | {uri for case in cases for uri, _ in case.test}
    )
    embedding = random_embedding(uris, args.dimension, seed=args.seed)
    write_embeddings(embedding, args.out, header=True)
    print(
        f"wrote {len(embedding)} vectors of dimension {args.dimension} "
        f"to {args.out}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
