#!/usr/bin/env python3
"""Materialize the SPARQL query files for every domain and test case.

Each query file is produced by substituting one domain's IRI bindings
into a per-family skeleton.  The files land in
``src/kgcbench/queries/<domain>/<tcXX>/{positive,negative,hard}.rq``
and ship with the package, so adding a domain means adding one
bindings row and re-running this script (or dropping in hand-written
.rq files).

The people-domain renderings are the canonical published forms; a few
of their quirks are therefore preserved verbatim rather than repaired:

* connection negatives join two NOT EXISTS clauses with the keyword
  ``AND`` (SPARQL proper wants ``&&``);
* the fixed-object hard query projects two variables;
* the qualified-relation hard query uses a decoy object type and omits
  one statement-terminating dot (which is still valid SPARQL).

Inverse families (tc02, tc05, tc08, tc10, tc12) swap subject and
object in every edge pattern of their base family.  tc03 defines no
hard variant.  Prefixes are deliberately absent here; the fetcher
prepends the PREFIX header at execution time.
"""

import os
import sys

sys.path.insert(
    0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src")
)

from kgcbench.dbpedia import HARDLESS_FAMILIES, POLARITY_FILES  # noqa: E402

OUT_ROOT = os.path.join(
    os.path.dirname(os.path.abspath(__file__)), "..", "src", "kgcbench", "queries"
)

# one row per domain: every IRI a skeleton may need
BINDINGS = {
    "people": {
        "class": "dbo:Person",
        "rel": "dbo:child",
        "entity": "dbr:New_York_City",
        "pointer_rel": "dbo:birthPlace",
        "qual_rel": "dbo:team",
        "qual_type": "dbo:BasketballTeam",
        "decoy_type": "dbo:BaseballTeam",
        "card_rel": "dbo:award",
        "qcard_rel": "dbo:recordLabel",
        "qcard_type": "dbo:RecordLabel",
    },
    "books": {
        "class": "dbo:Book",
        "rel": "dbo:author",
        "entity": "dbr:London",
        "pointer_rel": "dbo:publisher",
        "qual_rel": "dbo:author",
        "qual_type": "dbo:Writer",
        "decoy_type": "dbo:Journalist",
        "card_rel": "dbo:subsequentWork",
        "qcard_rel": "dbo:author",
        "qcard_type": "dbo:Writer",
    },
    "cities": {
        "class": "dbo:City",
        "rel": "dbo:isPartOf",
        "entity": "dbr:Germany",
        "pointer_rel": "dbo:country",
        "qual_rel": "dbo:leader",
        "qual_type": "dbo:Politician",
        "decoy_type": "dbo:Monarch",
        "card_rel": "dbo:leader",
        "qcard_rel": "dbo:leader",
        "qcard_type": "dbo:Politician",
    },
    "albums": {
        "class": "dbo:Album",
        "rel": "dbo:producer",
        "entity": "dbr:Columbia_Records",
        "pointer_rel": "dbo:recordLabel",
        "qual_rel": "dbo:artist",
        "qual_type": "dbo:Band",
        "decoy_type": "dbo:MusicalArtist",
        "card_rel": "dbo:producer",
        "qcard_rel": "dbo:artist",
        "qcard_type": "dbo:Band",
    },
    "movies": {
        "class": "dbo:Film",
        "rel": "dbo:starring",
        "entity": "dbr:United_States",
        "pointer_rel": "dbo:country",
        "qual_rel": "dbo:director",
        "qual_type": "dbo:Actor",
        "decoy_type": "dbo:Comedian",
        "card_rel": "dbo:starring",
        "qcard_rel": "dbo:starring",
        "qcard_type": "dbo:Actor",
    },
    "species": {
        "class": "dbo:Species",
        "rel": "dbo:genus",
        "entity": "dbr:Carnivora",
        "pointer_rel": "dbo:order",
        "qual_rel": "dbo:family",
        "qual_type": "dbo:Species",
        "decoy_type": "dbo:Animal",
        "card_rel": "dbo:genus",
        "qcard_rel": "dbo:family",
        "qcard_type": "dbo:Species",
    },
}

# which binding feeds which placeholder, per family
PLACEHOLDERS = {
    "tc01": {"class": "class", "property": "rel"},
    "tc02": {"class": "class", "property": "rel"},
    "tc03": {"class": "class", "property": "rel"},
    "tc04": {"class": "class", "entity": "entity"},
    "tc05": {"class": "class", "entity": "entity"},
    "tc06": {"class": "class", "property": "pointer_rel", "entity": "entity"},
    "tc07": {
        "class": "class",
        "property": "qual_rel",
        "type": "qual_type",
        "decoy": "decoy_type",
    },
    "tc08": {
        "class": "class",
        "property": "qual_rel",
        "type": "qual_type",
        "decoy": "decoy_type",
    },
    "tc09": {"class": "class", "property": "card_rel"},
    "tc10": {"class": "class", "property": "card_rel"},
    "tc11": {"class": "class", "property": "qcard_rel", "type": "qcard_type"},
    "tc12": {"class": "class", "property": "qcard_rel", "type": "qcard_type"},
}

SKELETONS = {
    # ---- existential restriction, outgoing -----------------------------
    ("tc01", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y . }
""",
    ("tc01", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?z})}
""",
    ("tc01", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y @property@ ?x .
  FILTER(NOT EXISTS {
    ?x @property@ ?z})}
""",
    # ---- existential restriction, incoming -----------------------------
    ("tc02", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y @property@ ?x . }
""",
    ("tc02", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?z @property@ ?x})}
""",
    ("tc02", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y .
  FILTER(NOT EXISTS {
    ?z @property@ ?x})}
""",
    # ---- existential restriction, either direction ----------------------
    ("tc03", "positive"): """\
SELECT DISTINCT(?x) WHERE {{
  ?x a @class@ .
  ?x @property@ ?y }
UNION {
  ?x a @class@ .
  ?y @property@ ?x }}
""",
    ("tc03", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?y }
  AND NOT EXISTS {
    ?z @property@ ?x })}
""",
    # ---- connection to a fixed entity, any relation ----------------------
    ("tc04", "positive"): """\
SELECT DISTINCT(?x) WHERE {{
  ?x a @class@ .
  ?x ?y @entity@ }
UNION {
  ?x a @class@ .
  @entity@ ?y ?x }}
""",
    ("tc04", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x ?y @entity@ }
  AND NOT EXISTS {
    @entity@ ?y ?x })}
""",
    ("tc04", "hard"): """\
SELECT DISTINCT(?x) WHERE {{
  ?x a @class@ .
  ?x ?y1 ?z .
  ?z ?y2 @entity@ }
UNION {
  ?x a @class@ .
  ?z ?y1 ?x .
  @entity@ ?y2 ?z }
FILTER(NOT EXISTS {
  ?x ?r @entity@ }
AND NOT EXISTS {
  @entity@ ?s ?x })}
""",
    # ---- two-hop chain to a fixed entity ---------------------------------
    ("tc05", "positive"): """\
SELECT DISTINCT(?x) WHERE {{
  ?x a @class@ .
  ?x ?y1 ?z .
  ?z ?y2 @entity@ }
UNION {
  ?x a @class@ .
  ?z ?y1 ?x .
  @entity@ ?y2 ?z }}
""",
    ("tc05", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x ?y1 ?z .
    ?z ?y2 @entity@ }
  AND NOT EXISTS {
    ?z ?y1 ?x .
    @entity@ ?y2 ?z })}
""",
    ("tc05", "hard"): """\
SELECT DISTINCT(?x) WHERE {{
  ?x a @class@ .
  ?x ?y1 ?z .
  @entity@ ?y2 ?z }
UNION {
  ?x a @class@ .
  ?z ?y1 ?x .
  ?z ?y2 @entity@ }
FILTER(NOT EXISTS {
  ?x ?r1 ?w .
  ?w ?r2 @entity@ }
AND NOT EXISTS {
  ?w ?r1 ?x .
  @entity@ ?r2 ?w })}
""",
    # ---- a fixed object via a fixed relation ------------------------------
    ("tc06", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ @entity@ }
""",
    ("tc06", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ @entity@ })}
""",
    ("tc06", "hard"): """\
SELECT DISTINCT(?x) ?r WHERE {{
  ?x a @class@ .
  ?x @property@ ?y .
  @entity@ ?r ?x .
  FILTER(?y != @entity@) }
UNION {
  ?x a @class@ .
  ?x @property@ ?y .
  ?x ?r @entity@ .
  FILTER(?y != @entity@) }}
""",
    # ---- qualified relation, outgoing --------------------------------------
    ("tc07", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y .
  ?y a @type@ }
""",
    ("tc07", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?y .
    ?y a @type@})}
""",
    ("tc07", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?z1 .
  ?x ?r ?z2 .
  ?z2 a @decoy@
  FILTER(NOT EXISTS {
    ?x @property@ ?y .
    ?y a @type@ })}
""",
    # ---- qualified relation, incoming ---------------------------------------
    ("tc08", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y @property@ ?x .
  ?y a @type@ }
""",
    ("tc08", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?y @property@ ?x .
    ?y a @type@})}
""",
    ("tc08", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?z1 @property@ ?x .
  ?z2 ?r ?x .
  ?z2 a @decoy@
  FILTER(NOT EXISTS {
    ?y @property@ ?x .
    ?y a @type@ })}
""",
    # ---- cardinality >= 2, outgoing -------------------------------------------
    ("tc09", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y1 .
  ?x @property@ ?y2 .
  FILTER(?y1 != ?y2)}
""",
    ("tc09", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?y1 .
    ?x @property@ ?y2 .
    FILTER(?y1 != ?y2)})}
""",
    ("tc09", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y .
  FILTER(NOT EXISTS {
    ?x @property@ ?z .
    FILTER(?y != ?z)})}
""",
    # ---- cardinality >= 2, incoming ---------------------------------------------
    ("tc10", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y1 @property@ ?x .
  ?y2 @property@ ?x .
  FILTER(?y1 != ?y2)}
""",
    ("tc10", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?y1 @property@ ?x .
    ?y2 @property@ ?x .
    FILTER(?y1 != ?y2)})}
""",
    ("tc10", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y @property@ ?x .
  FILTER(NOT EXISTS {
    ?z @property@ ?x .
    FILTER(?y != ?z)})}
""",
    # ---- qualified cardinality >= 2, outgoing --------------------------------------
    ("tc11", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y1 .
  ?y1 a @type@ .
  ?x @property@ ?y2 .
  ?y2 a @type@ .
  FILTER(?y1 != ?y2)}
""",
    ("tc11", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?y1 .
    ?y1 a @type@ .
    ?x @property@ ?y2 .
    ?y2 a @type@ .
    FILTER(?y1 != ?y2)})}
""",
    ("tc11", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?x @property@ ?y1 .
  ?y1 a @type@ .
  FILTER(NOT EXISTS {
    ?x @property@ ?y2 .
    ?y2 a @type@ .
    FILTER(?y1 != ?y2)})}
""",
    # ---- qualified cardinality >= 2, incoming -----------------------------------------
    ("tc12", "positive"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y1 @property@ ?x .
  ?y1 a @type@ .
  ?y2 @property@ ?x .
  ?y2 a @type@ .
  FILTER(?y1 != ?y2)}
""",
    ("tc12", "negative"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  FILTER(NOT EXISTS {
    ?y1 @property@ ?x .
    ?y1 a @type@ .
    ?y2 @property@ ?x .
    ?y2 a @type@ .
    FILTER(?y1 != ?y2)})}
""",
    ("tc12", "hard"): """\
SELECT DISTINCT(?x) WHERE {
  ?x a @class@ .
  ?y1 @property@ ?x .
  ?y1 a @type@ .
  FILTER(NOT EXISTS {
    ?y2 @property@ ?x .
    ?y2 a @type@ .
    FILTER(?y1 != ?y2)})}
""",
}


def render(template: str, values: dict) -> str:
    text = template
    for key, value in values.items():
        text = text.replace(f"@{key}@", value)
    if "@" in text:
        raise ValueError(f"unbound placeholder remains in:\n{text}")
    return text


def main() -> None:
    written = 0
    for domain in sorted(BINDINGS):
        row = BINDINGS[domain]
        for family in sorted(PLACEHOLDERS):
            values = {
                placeholder: row[binding]
                for placeholder, binding in PLACEHOLDERS[family].items()
            }
            for polarity, filename in POLARITY_FILES.items():
                if polarity == "hardNegative" and family in HARDLESS_FAMILIES:
                    continue
                text = render(SKELETONS[(family, _short(polarity))], values)
                directory = os.path.join(OUT_ROOT, domain, family)
                os.makedirs(directory, exist_ok=True)
                path = os.path.join(directory, filename)
                with open(path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(text)
                written += 1
    print(f"wrote {written} query files under {os.path.normpath(OUT_ROOT)}")


def _short(polarity: str) -> str:
    return {"positive": "positive", "negative": "negative", "hardNegative": "hard"}[
        polarity
    ]


if __name__ == "__main__":
    main()
