#!/usr/bin/env python3
"""Build the diagnostic oracle-feature embedding for a synthetic gold standard.

Each entity that appears in any train/test split receives a 0/1 vector with
one component per test-case family, set to 1 exactly when the entity is a
member of that family's bound class expression in the accompanying graph.
Evaluating this embedding checks the harness ceiling: every test case must
be perfectly separable.
"""

import argparse
import os
import sys

from kgcbench.constructors import ConstructorExpr
from kgcbench.evaluate import oracle_embedding, write_embeddings
from kgcbench.goldstandard import discover_cases
from kgcbench.graph import load_ntriples


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "gold_dir", help="gold-standard version directory (contains graph.nt)"
    )
    parser.add_argument("--out", required=True, help="embedding file to write")
    args = parser.parse_args(argv)

    graph_path = os.path.join(args.gold_dir, "graph.nt")
    if not os.path.isfile(graph_path):
        print(f"error: no graph.nt under {args.gold_dir}", file=sys.stderr)
        return 1
    cases = discover_cases(args.gold_dir)
    if not cases:
        print(f"error: no gold-standard cases under {args.gold_dir}", file=sys.stderr)
        return 1

    graph = load_ntriples(graph_path)
    exprs = {
        case.test_case: ConstructorExpr.from_text(case.expr_text) for case in cases
    }
    uris = sorted(
        {uri for case in cases for uri, _ in case.train}
        | {uri for case in cases for uri, _ in case.test}
    )
    embedding = oracle_embedding(graph, exprs, uris)
    write_embeddings(embedding, args.out, header=True)
    print(
        f"wrote {len(embedding)} vectors of dimension {embedding.dimension} "
        f"to {args.out}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
