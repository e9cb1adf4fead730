"""Node-classification benchmarking for knowledge-graph embeddings.

The package has three pillars:

* gold-standard synthesis over a generated knowledge graph whose
  positive/negative example sets are exact by construction
  (:mod:`kgcbench.synth`),
* gold-standard extraction from a SPARQL endpoint using shipped query
  templates (:mod:`kgcbench.dbpedia`),
* evaluation of arbitrary entity-embedding files against either kind of
  gold standard with a fixed classifier-and-significance protocol
  (:mod:`kgcbench.evaluate`).
"""

from kgcbench.graph import (
    ANY,
    KnowledgeGraph,
    NTriplesError,
    RDF_TYPE,
    Triple,
    UriError,
)

__version__ = "0.1.0"

__all__ = [
    "ANY",
    "KnowledgeGraph",
    "NTriplesError",
    "RDF_TYPE",
    "Triple",
    "UriError",
    "__version__",
]
