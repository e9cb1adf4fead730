"""Gold-standard extraction from a SPARQL endpoint.

The query texts live as data files under ``kgcbench/queries/``, one
per (domain, test case, polarity).  Executing a query pages through
results with LIMIT/OFFSET, retries transient transport failures, and
shuffles the collected URIs with a seeded generator before truncating
to the requested count, so a build against a fixed endpoint state is
reproducible.

Endpoints of the form ``fixture:///path/to/dir`` short-circuit HTTP
entirely: each query is answered from a JSON file named by the hash of
the query text, which is how the offline tests and recorded-response
builds work.  ``save_fixture`` writes files in that scheme.

A few published query forms are reproduced verbatim even though they
are not strictly valid SPARQL (a literal ``AND`` joining two NOT
EXISTS clauses; one hard query projecting two variables).  Fidelity to
the published texts wins here; endpoints that reject them simply
surface a protocol error for those cells.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from kgcbench.goldstandard import LabeledExamples, split_stratified, write_case
from kgcbench.manifest import digest_tree, write_manifest

DOMAINS = ("albums", "books", "cities", "movies", "people", "species")
POLARITIES = ("positive", "negative", "hardNegative")
POLARITY_FILES = {
    "positive": "positive.rq",
    "negative": "negative.rq",
    "hardNegative": "hard.rq",
}
HARDLESS_FAMILIES = frozenset({"tc03"})
SIZE_CLASSES = (50, 500, 5000)

PREFIX_HEADER = (
    "PREFIX dbo: <http://dbpedia.org/ontology/>\n"
    "PREFIX dbr: <http://dbpedia.org/resource/>\n"
)

_QUERY_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "queries")
_PLACEHOLDER_RE = re.compile(r"@([A-Za-z_][A-Za-z0-9_]*)@")

_PAGE_SIZE = 10_000
_MAX_RESULTS = 200_000
_MAX_ATTEMPTS = 3
_BACKOFF_SECONDS = 2.0


class RenderError(ValueError):
    """A placeholder in a query template has no binding."""


class QueryNotDefinedError(LookupError):
    """The requested (test case, polarity) combination has no query."""


class TransportError(RuntimeError):
    """The endpoint could not be reached after all retries."""


class ProtocolError(RuntimeError):
    """The endpoint answered with something other than SPARQL JSON."""


@dataclass(frozen=True)
class QuerySpec:
    """One query template plus the IRIs to substitute into it."""

    test_case: str
    domain: str
    polarity: str
    template: str
    bindings: Dict[str, str] = field(default_factory=dict)


def render_query(spec: QuerySpec) -> str:
    """Pure text substitution of ``@name@`` placeholders."""
    text = spec.template
    for name, iri in spec.bindings.items():
        text = text.replace(f"@{name}@", iri)
    unbound = _PLACEHOLDER_RE.findall(text)
    if unbound:
        raise RenderError(
            f"{spec.domain}/{spec.test_case}/{spec.polarity}: "
            f"unbound placeholders {sorted(set(unbound))}"
        )
    return text


def query_path(domain: str, test_case: str, polarity: str) -> str:
    return os.path.join(_QUERY_DIR, domain, test_case, POLARITY_FILES[polarity])


def has_query(domain: str, test_case: str, polarity: str) -> bool:
    if polarity == "hardNegative" and test_case in HARDLESS_FAMILIES:
        return False
    return os.path.exists(query_path(domain, test_case, polarity))


def load_query(domain: str, test_case: str, polarity: str) -> QuerySpec:
    """Load a shipped, fully-rendered query as a QuerySpec."""
    if polarity not in POLARITY_FILES:
        raise ValueError(f"unknown polarity: {polarity!r}")
    if polarity == "hardNegative" and test_case in HARDLESS_FAMILIES:
        raise QueryNotDefinedError(
            f"no hard-negative query is defined for {test_case}"
        )
    path = query_path(domain, test_case, polarity)
    if not os.path.exists(path):
        raise QueryNotDefinedError(
            f"no query file for {domain}/{test_case}/{polarity} at {path}"
        )
    with open(path, "r", encoding="utf-8") as handle:
        template = handle.read()
    return QuerySpec(
        test_case=test_case,
        domain=domain,
        polarity=polarity,
        template=template,
        bindings={},
    )


# -- transport ------------------------------------------------------------


def fixture_name(query: str) -> str:
    return hashlib.sha256(query.encode("utf-8")).hexdigest()[:16] + ".json"


def save_fixture(directory: str, query: str, uris: Sequence[str]) -> str:
    """Record a canned response for a query in SPARQL-results form."""
    os.makedirs(directory, exist_ok=True)
    payload = {
        "head": {"vars": ["x"]},
        "results": {
            "bindings": [{"x": {"type": "uri", "value": u}} for u in uris]
        },
    }
    path = os.path.join(directory, fixture_name(query))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=1)
        handle.write("\n")
    return path


def record_fixture_pages(
    directory: str, query: str, uris: Sequence[str]
) -> List[str]:
    """Record every page the paged fetcher will request for a query."""
    paths = []
    # one page past the data, so a full final page is followed by the
    # empty page that tells the fetcher to stop
    for offset in range(0, len(uris) + 1, _PAGE_SIZE):
        page_query = f"{query.rstrip()}\nLIMIT {_PAGE_SIZE} OFFSET {offset}"
        paths.append(
            save_fixture(directory, page_query, uris[offset : offset + _PAGE_SIZE])
        )
    return paths


def _fixture_transport(endpoint: str, query: str) -> dict:
    directory = endpoint[len("fixture://") :]
    path = os.path.join(directory, fixture_name(query))
    if not os.path.exists(path):
        raise TransportError(f"no recorded fixture for this query under {directory}")
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _http_transport(endpoint: str, query: str) -> dict:
    import requests

    last_error: Optional[Exception] = None
    for attempt in range(_MAX_ATTEMPTS):
        if attempt:
            time.sleep(_BACKOFF_SECONDS * (2 ** (attempt - 1)))
        try:
            response = requests.post(
                endpoint,
                data={"query": query},
                headers={"Accept": "application/sparql-results+json"},
                timeout=60,
            )
        except requests.RequestException as exc:
            last_error = exc
            continue
        if response.status_code >= 500:
            last_error = RuntimeError(f"HTTP {response.status_code}")
            continue
        if response.status_code != 200:
            raise ProtocolError(
                f"endpoint answered HTTP {response.status_code}: "
                f"{response.text[:200]}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ProtocolError(f"response is not JSON: {exc}") from exc
    raise TransportError(f"endpoint unreachable after {_MAX_ATTEMPTS} attempts: {last_error}")


def execute_query(
    endpoint: str,
    query: str,
    transport: Optional[Callable[[str, str], dict]] = None,
) -> List[str]:
    """Run one query (no paging) and return its URI bindings in order."""
    if transport is None:
        transport = (
            _fixture_transport if endpoint.startswith("fixture://") else _http_transport
        )
    payload = transport(endpoint, query)
    try:
        variables = payload["head"]["vars"]
        rows = payload["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise ProtocolError(f"malformed SPARQL JSON response: {exc}") from exc
    if not variables:
        raise ProtocolError("response projects no variables")
    first = variables[0]
    uris: List[str] = []
    for row in rows:
        cell = row.get(first)
        if cell is None:
            continue
        if cell.get("type") == "uri":
            uris.append(cell["value"])
    return uris


def fetch_examples(
    endpoint: str,
    query: str,
    limit: int,
    seed: int,
    transport: Optional[Callable[[str, str], dict]] = None,
    warnings: Optional[List[str]] = None,
) -> List[str]:
    """Page through a query's results, dedupe, shuffle with the seed,
    and return at most ``limit`` URIs.

    A result set smaller than ``limit`` is returned in full, with a
    short-list note appended to ``warnings`` if a list was given.
    """
    seen: Dict[str, None] = {}
    offset = 0
    while offset < _MAX_RESULTS:
        page_query = f"{query.rstrip()}\nLIMIT {_PAGE_SIZE} OFFSET {offset}"
        page = execute_query(endpoint, page_query, transport)
        for uri in page:
            seen.setdefault(uri)
        if len(page) < _PAGE_SIZE:
            break
        offset += _PAGE_SIZE
    uris = list(seen)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(uris))
    shuffled = [uris[i] for i in order]
    if len(shuffled) < limit and warnings is not None:
        warnings.append(
            f"short list: {len(shuffled)} of {limit} requested results"
        )
    return shuffled[:limit]


# -- build ------------------------------------------------------------------


def _cell_seed(base_seed: int, domain: str, test_case: str, purpose: str) -> int:
    label = f"{domain}/{test_case}/{purpose}"
    return int(
        np.random.SeedSequence(
            [base_seed, zlib.crc32(label.encode("utf-8"))]
        ).generate_state(1)[0]
    )


def build_dbpedia_gold_standard(
    endpoint: str,
    out_dir: str,
    domains: Sequence[str] = DOMAINS,
    size_classes: Sequence[int] = SIZE_CLASSES,
    seed: int = 0,
    version: str = "dbpedia",
    transport: Optional[Callable[[str, str], dict]] = None,
    test_cases: Optional[Sequence[str]] = None,
) -> Dict[str, object]:
    """Extract, size, split, and write the endpoint-backed gold standard.

    Cells that cannot reach a size class keep their smaller classes and
    are recorded as skipped; hard splits are emitted only where a hard
    query exists and returned enough entities.
    """
    from kgcbench.constructors import FAMILIES

    sizes = sorted(set(int(s) for s in size_classes), reverse=True)
    if not sizes or sizes[-1] < 2:
        raise ValueError("size classes must be integers >= 2")
    families = tuple(test_cases) if test_cases is not None else FAMILIES
    version_dir = os.path.join(out_dir, version)
    os.makedirs(version_dir, exist_ok=True)
    skipped: List[Dict[str, str]] = []
    warnings: List[str] = []
    queries_used: Dict[str, str] = {}
    max_size = sizes[0]

    for domain in domains:
        if domain not in DOMAINS:
            raise ValueError(f"unknown domain: {domain!r} (expected one of {DOMAINS})")
        for family in families:
            cell = f"{family}/{domain}"
            pools: Dict[str, List[str]] = {}
            for polarity in POLARITIES:
                if not has_query(domain, family, polarity):
                    continue
                spec = load_query(domain, family, polarity)
                query = PREFIX_HEADER + render_query(spec)
                queries_used[f"{cell}/{polarity}"] = os.path.relpath(
                    query_path(domain, family, polarity), _QUERY_DIR
                )
                # the full result set (up to the global cap) is kept so
                # that dropping overlaps below cannot starve a size class
                pools[polarity] = fetch_examples(
                    endpoint,
                    query,
                    limit=_MAX_RESULTS,
                    seed=_cell_seed(seed, domain, family, polarity),
                    transport=transport,
                )
            positives = pools.get("positive", [])
            positive_set = set(positives)
            # an entity answering both queries is dropped from the negatives
            negatives = [u for u in pools.get("negative", []) if u not in positive_set]
            hard = [u for u in pools.get("hardNegative", []) if u not in positive_set]
            for polarity, pool in (("positive", positives), ("negative", negatives)):
                if len(pool) < max_size:
                    warnings.append(
                        f"{cell}/{polarity}: short list: "
                        f"{len(pool)} of {max_size} requested results"
                    )

            for size in sizes:
                if len(positives) < size or len(negatives) < size:
                    skipped.append(
                        {
                            "cell": f"{cell}/{size}",
                            "reason": (
                                "not enough examples: "
                                f"{len(positives)} positives, "
                                f"{len(negatives)} negatives"
                            ),
                        }
                    )
                    continue
                pos_s, neg_s, hard_s = positives[:size], negatives[:size], hard[:size]
                examples = LabeledExamples(
                    test_case=family,
                    positives=set(pos_s),
                    negatives=set(neg_s),
                    hard_negatives=set(hard_s) if len(hard) >= size else set(),
                )
                split_rng = np.random.default_rng(
                    _cell_seed(seed, domain, family, f"split-{size}")
                )
                split = split_stratified(pos_s, neg_s, split_rng)
                hard_split = None
                if len(hard) >= size:
                    hard_split = split_stratified(pos_s, hard_s, split_rng)
                elif has_query(domain, family, "hardNegative"):
                    skipped.append(
                        {
                            "cell": f"{cell}/{size}/hard",
                            "reason": f"not enough examples: {len(hard)} hard negatives",
                        }
                    )
                write_case(
                    version_dir,
                    family,
                    domain,
                    size,
                    examples,
                    split,
                    hard_split=hard_split,
                )

    manifest = write_manifest(
        version_dir,
        {
            "subcommand": "generate-dbpedia",
            "gold_standard_version": version,
            "endpoint": endpoint,
            "domains": list(domains),
            "size_classes": sizes,
            "test_cases": list(families),
            "seed": seed,
            "queries": queries_used,
            "skipped": skipped,
            "warnings": warnings,
            "outputs": digest_tree(version_dir),
        },
    )
    return manifest
