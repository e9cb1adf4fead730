"""Command-line entry point.

Four subcommands cover the full workflow: ``generate-synthetic`` and
``generate-dbpedia`` build versioned gold standards, ``evaluate`` scores
embedding files against one, and ``report`` re-derives the summary CSVs
from a previously written per-classifier report.

Exit codes are a stable contract: 0 on success, 1 on runtime failure
(generation, transport, or evaluation errors), 2 on usage errors.  All
progress and diagnostics go to standard error; only artifacts are
written to disk.
"""

from __future__ import annotations

import csv
import logging
import os
import sys
from dataclasses import fields as dataclass_fields
from typing import Dict, List, Optional, Sequence, Tuple

import click

from kgcbench import __version__
from kgcbench.constructors import FAMILIES
from kgcbench.dbpedia import (
    DOMAINS,
    HARDLESS_FAMILIES,
    PREFIX_HEADER,
    POLARITY_FILES,
    SIZE_CLASSES,
    build_dbpedia_gold_standard,
    load_query,
    render_query,
)
from kgcbench.evaluate import (
    MISSING_VECTOR_POLICIES,
    REPORT_FILES,
    CellResult,
    EmbeddingFormatError,
    load_embeddings,
    emit_reports,
    run_suite,
)
from kgcbench.manifest import digest_tree, file_digest, load_manifest, write_manifest
from kgcbench.synth import GenerationError, SynthParams, generate_and_write

log = logging.getLogger("kgcbench")

ENDPOINT_ENV_VAR = "KGCBENCH_ENDPOINT"

_SYNTH_FIELD_TYPES = {
    field.name: field.type for field in dataclass_fields(SynthParams)
}


def _fail(message: str) -> "click.exceptions.Exit":
    """Log a runtime failure and return exit status 1."""
    log.error("%s", message)
    return click.exceptions.Exit(1)


def read_config_file(path: str) -> Dict[str, str]:
    """Parse a flat ``key = value`` config file (# starts a comment)."""
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(
                    f"{path}:{number}: expected 'key = value', got {raw.strip()!r}"
                )
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _SYNTH_FIELD_TYPES:
                raise click.UsageError(f"{path}:{number}: unknown parameter {key!r}")
            values[key] = value
    return values


def _coerce_config_value(key: str, text: str):
    kind = _SYNTH_FIELD_TYPES[key]
    try:
        if kind in ("int", int):
            return int(text)
        if kind in ("float", float):
            return float(text)
    except ValueError as err:
        raise click.UsageError(f"config parameter {key}: {err}") from None
    return text


def build_synth_params(
    config_path: Optional[str], flag_values: Dict[str, object]
) -> SynthParams:
    """Merge defaults, config-file values, and explicit flags (flags win)."""
    merged: Dict[str, object] = {}
    if config_path is not None:
        for key, text in read_config_file(config_path).items():
            merged[key] = _coerce_config_value(key, text)
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    try:
        params = SynthParams(**merged)
        params.validate()
        return params
    except (TypeError, ValueError) as err:
        raise click.UsageError(str(err)) from None


@click.group()
@click.version_option(version=__version__, prog_name="kgcbench")
def main() -> None:
    """Gold-standard generation and embedding evaluation for node classification."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


@main.command("generate-synthetic")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="generation seed (default 0)")
@click.option("--num-classes", type=int, default=None)
@click.option("--num-properties", type=int, default=None)
@click.option("--num-instances", type=int, default=None)
@click.option("--branching-factor", type=int, default=None)
@click.option("--max-triples-per-node", type=int, default=None)
@click.option("--num-nodes-interest", type=int, default=None)
@click.option("--skew-stop", type=float, default=None)
@click.option("--min-card", type=int, default=None)
@click.option("--version", "version_tag", type=str, default=None, help="gold-standard version tag (default v1)")
def generate_synthetic(out: str, config_path: Optional[str], **flag_values) -> None:
    """Generate a synthetic gold standard over a fresh synthetic graph."""
    flag_values["version"] = flag_values.pop("version_tag")
    params = build_synth_params(config_path, flag_values)
    log.info("generating synthetic gold standard %s under %s", params.version, out)
    try:
        version_dir, manifest = generate_and_write(params, out)
    except GenerationError as err:
        raise _fail(f"generation failed: {err}")
    log.info(
        "wrote %d files to %s (content digest %s)",
        len(manifest["outputs"]) + 1,
        version_dir,
        manifest["content_digest"],
    )


def _parse_sizes(sizes: Sequence[int]) -> Tuple[int, ...]:
    if not sizes:
        return SIZE_CLASSES
    if any(size < 2 for size in sizes):
        raise click.UsageError("--sizes values must be >= 2")
    return tuple(sizes)


def _render_all_queries(out: str, domains: Sequence[str], test_cases: Sequence[str]) -> int:
    count = 0
    for domain in domains:
        for family in test_cases:
            for polarity, filename in POLARITY_FILES.items():
                if polarity == "hardNegative" and family in HARDLESS_FAMILIES:
                    continue
                text = PREFIX_HEADER + render_query(load_query(domain, family, polarity))
                directory = os.path.join(out, "queries", family, domain)
                os.makedirs(directory, exist_ok=True)
                path = os.path.join(directory, filename)
                with open(path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(text)
                count += 1
    write_manifest(
        out,
        {
            "subcommand": "generate-dbpedia",
            "render_only": True,
            "domains": list(domains),
            "test_cases": list(test_cases),
            "outputs": digest_tree(out),
        },
    )
    return count


@main.command("generate-dbpedia")
@click.option(
    "--endpoint",
    envvar=ENDPOINT_ENV_VAR,
    default=None,
    help=f"SPARQL endpoint URL (or set {ENDPOINT_ENV_VAR})",
)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option(
    "--domains",
    multiple=True,
    type=click.Choice(DOMAINS),
    help="restrict to these domains (default: all)",
)
@click.option(
    "--sizes", multiple=True, type=int, help="size classes (default: 50 500 5000)"
)
@click.option(
    "--test-cases",
    multiple=True,
    type=click.Choice(FAMILIES),
    help="restrict to these test cases (default: all)",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--version", "version_tag", default="dbpedia", show_default=True)
@click.option(
    "--render-only",
    is_flag=True,
    help="write the rendered queries and stop; no network access",
)
def generate_dbpedia(
    endpoint: Optional[str],
    out: str,
    domains: Sequence[str],
    sizes: Sequence[int],
    test_cases: Sequence[str],
    seed: int,
    version_tag: str,
    render_only: bool,
) -> None:
    """Extract a DBpedia-style gold standard through SPARQL queries."""
    chosen_domains = tuple(domains) if domains else DOMAINS
    chosen_cases = tuple(test_cases) if test_cases else FAMILIES
    if render_only:
        count = _render_all_queries(out, chosen_domains, chosen_cases)
        log.info("rendered %d queries under %s", count, os.path.join(out, "queries"))
        return
    if endpoint is None:
        raise click.UsageError(
            f"--endpoint is required (or set {ENDPOINT_ENV_VAR}) unless --render-only"
        )
    size_classes = _parse_sizes(sizes)
    log.info(
        "building gold standard %s from %s (domains=%s, sizes=%s)",
        version_tag,
        endpoint,
        ",".join(chosen_domains),
        ",".join(str(s) for s in size_classes),
    )
    try:
        manifest = build_dbpedia_gold_standard(
            endpoint,
            out,
            domains=chosen_domains,
            size_classes=size_classes,
            seed=seed,
            version=version_tag,
            test_cases=chosen_cases,
        )
    except Exception as err:  # transport, protocol, or disk errors
        raise _fail(f"extraction failed: {err}")
    for record in manifest.get("skipped", []):
        log.warning("skipped %s: %s", record["cell"], record["reason"])
    log.info("wrote gold standard (content digest %s)", manifest["content_digest"])


def _embedding_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


@main.command("evaluate")
@click.argument("gold_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("embedding_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option(
    "--policy",
    type=click.Choice(MISSING_VECTOR_POLICIES),
    default="error",
    show_default=True,
    help="what to do when an entity has no vector",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--exact", is_flag=True, help="use the exact binomial tail instead of the normal approximation")
@click.option("--jobs", type=int, default=1, show_default=True, help="parallel evaluation cells")
def evaluate(
    gold_dir: str,
    embedding_files: Sequence[str],
    out: str,
    policy: str,
    seed: int,
    alpha: float,
    exact: bool,
    jobs: int,
) -> None:
    """Score embedding files against a gold standard and emit CSV reports."""
    if jobs < 1:
        raise click.UsageError("--jobs must be >= 1")
    names = [_embedding_name(path) for path in embedding_files]
    if len(set(names)) != len(names):
        raise click.UsageError("embedding file basenames must be distinct")
    embeddings = []
    for name, path in zip(names, embedding_files):
        try:
            embeddings.append((name, load_embeddings(path)))
        except EmbeddingFormatError as err:
            raise _fail(f"{path}: {err}")
        log.info("loaded %s: %d vectors", name, len(embeddings[-1][1]))
    results = run_suite(
        gold_dir,
        embeddings,
        policy=policy,
        base_seed=seed,
        alpha=alpha,
        exact=exact,
        jobs=jobs,
    )
    if not results:
        raise _fail(f"no gold-standard cases found under {gold_dir}")
    os.makedirs(out, exist_ok=True)
    emit_reports(results, out)
    gold_digest = None
    try:
        gold_digest = load_manifest(gold_dir).get("content_digest")
    except FileNotFoundError:
        pass
    write_manifest(
        out,
        {
            "subcommand": "evaluate",
            "gold_dir": gold_dir,
            "gold_manifest_digest": gold_digest,
            "embeddings": {
                name: file_digest(path)
                for name, path in zip(names, embedding_files)
            },
            "parameters": {
                "policy": policy,
                "alpha": alpha,
                "exact": exact,
                "jobs": jobs,
            },
            "seed": seed,
            "outputs": digest_tree(out),
        },
    )
    failures = [result for result in results if result.error]
    scored = len(results) - len(failures)
    log.info("scored %d cells (%d failed) -> %s", scored, len(failures), out)
    if failures:
        for result in failures:
            log.error(
                "%s %s/%s/%s%s %s: %s",
                result.embedding,
                result.test_case,
                result.collection,
                result.size,
                "/hard" if result.hard else "",
                result.classifier,
                result.error,
            )
        raise click.exceptions.Exit(1)


def _load_cell_results(path: str) -> List[CellResult]:
    results = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            error = row["error"] or None
            results.append(
                CellResult(
                    embedding=row["embedding"],
                    test_case=row["test_case"],
                    collection=row["collection"],
                    size=int(row["size"]),
                    hard=row["hard"] == "true",
                    classifier=row["classifier"],
                    accuracy=None if error else float(row["accuracy"]),
                    n_test=None if error else int(row["n_test"]),
                    p_value=None if error else float(row["p_value"]),
                    significant=None if error else row["significant"] == "true",
                    error=error,
                )
            )
    return results


@main.command("report")
@click.option(
    "--from",
    "source",
    required=True,
    type=click.Path(exists=True),
    help="accuracy_per_classifier.csv, or a directory containing it",
)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def report(source: str, out: str) -> None:
    """Re-derive the summary CSVs from a per-classifier report."""
    if os.path.isdir(source):
        source = os.path.join(source, "accuracy_per_classifier.csv")
    try:
        results = _load_cell_results(source)
    except (OSError, KeyError, ValueError) as err:
        raise _fail(f"cannot read {source}: {err}")
    if not results:
        raise _fail(f"{source} contains no result rows")
    os.makedirs(out, exist_ok=True)
    emit_reports(results, out)
    write_manifest(
        out,
        {
            "subcommand": "report",
            "source": source,
            "source_digest": file_digest(source),
            "outputs": digest_tree(out),
        },
    )
    log.info("re-derived %s under %s", ", ".join(sorted(REPORT_FILES)), out)


if __name__ == "__main__":
    main()
