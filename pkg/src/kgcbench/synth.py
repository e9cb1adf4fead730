"""Synthetic gold-standard generation with exact example sets.

Pipeline (one sequential seeded random stream, so the whole run is a
pure function of the parameters):

1. build the ontology (class tree, properties, typed instance pool);
2. draw one concrete constructor expression per requested family:
   families that bind a relation get pairwise-distinct properties,
   never property #1, which is reserved as the universal root/root
   relation used for the relation-agnostic connection patterns;
3. mint fresh entities of interest (positives and negatives) per
   family, typed so that any edge added for them respects the chosen
   property's domain and range;
4. add the minimal pattern edges that make every positive satisfy its
   expression; counting families also give each negative one edge
   fewer than the bound, so the boundary is present in the data;
5. add random noise edges (a seeded count per entity of interest, the
   entity as subject) where every candidate edge is checked against
   every active expression and rejected if it would turn any
   non-designated entity into a member;
6. sweep the oracle over all non-class entities and assert that each
   expression's member set equals its designated positive set exactly;
7. write the versioned directory layout with stratified 80-20 splits.

Step 5's check is exhaustive rather than heuristic: for an edge
(s, q, o) the set of entities whose membership can change is provably
contained in {s, o}, extended by predecessors(s) when o is the two-hop
focus and by successors(o) when s is (the only family with non-local
membership is the two-hop one).  Because membership is monotone in the
triple set, verifying those candidates against the designated positive
sets after a tentative insertion decides the edge.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from kgcbench.constructors import FAMILIES, ConstructorExpr, matches
from kgcbench.goldstandard import (
    LabeledExamples,
    Split,
    split_stratified,
    write_case,
)
from kgcbench.graph import KnowledgeGraph, save_ntriples
from kgcbench.manifest import digest_tree, write_manifest
from kgcbench.ontology import (
    BASE,
    Ontology,
    PropertyDef,
    add_type_triples,
    build_ontology,
)

BOUND_R_FAMILIES = (
    "tc01",
    "tc02",
    "tc03",
    "tc06",
    "tc07",
    "tc08",
    "tc09",
    "tc10",
    "tc11",
    "tc12",
)

_MAX_BIND_TRIES = 200
_MAX_EDGE_TRIES = 100
_MAX_NOISE_TRIES = 50


class GenerationError(RuntimeError):
    """Raised when a test case cannot be instantiated."""


@dataclass(frozen=True)
class SynthParams:
    """Generator parameters; defaults are the v1 gold-standard values."""

    num_classes: int = 760
    num_properties: int = 1355
    num_instances: int = 10_000
    branching_factor: int = 5
    max_triples_per_node: int = 11
    num_nodes_interest: int = 1000
    skew_stop: float = 0.25
    seed: int = 0
    min_card: int = 2
    version: str = "v1"

    def validate(self) -> None:
        for name in (
            "num_classes",
            "num_properties",
            "num_instances",
            "branching_factor",
            "max_triples_per_node",
            "num_nodes_interest",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if not 0.0 < self.skew_stop <= 1.0:
            raise ValueError(f"skew_stop must be in (0, 1], got {self.skew_stop!r}")
        if self.min_card < 2:
            raise ValueError(f"min_card must be >= 2, got {self.min_card!r}")


@dataclass
class SyntheticGoldStandard:
    """In-memory result of a generation run."""

    params: SynthParams
    graph: KnowledgeGraph
    ontology: Ontology
    exprs: Dict[str, ConstructorExpr]
    positives: Dict[str, List[str]]
    negatives: Dict[str, List[str]]
    splits: Dict[str, Split]
    auxiliary: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def interest_entities(self) -> List[str]:
        ordered: List[str] = []
        for family in sorted(self.positives):
            ordered.extend(self.positives[family])
            ordered.extend(self.negatives[family])
        return ordered

    def instance_entities(self) -> List[str]:
        """Everything the oracle sweep ranges over: no class nodes."""
        return (
            self.ontology.instances() + self.interest_entities() + self.auxiliary
        )


class SyntheticGenerator:
    """Drives the generation pipeline for a chosen family subset."""

    def __init__(
        self, params: SynthParams, families: Sequence[str] = FAMILIES
    ) -> None:
        params.validate()
        unknown = set(families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown families: {sorted(unknown)}")
        self.params = params
        self.families = tuple(f for f in FAMILIES if f in set(families))
        self.rng = np.random.default_rng(params.seed)
        self.graph = KnowledgeGraph()
        self.ontology: Optional[Ontology] = None
        self.exprs: Dict[str, ConstructorExpr] = {}
        self.positives: Dict[str, Set[str]] = {}
        self.negatives: Dict[str, List[str]] = {}
        self.positive_order: Dict[str, List[str]] = {}
        self.auxiliary: List[str] = []
        self.warnings: List[str] = []
        self._by_class: Dict[str, List[str]] = {}
        self._class_nodes: Set[str] = set()
        self._within_cache: Dict[str, List[str]] = {}
        self._noise_props_cache: Dict[str, List[PropertyDef]] = {}
        self._prop_by_uri: Dict[str, PropertyDef] = {}
        self._focus_e4: Optional[str] = None
        self._focus_e5: Optional[str] = None

    # -- stage 1: ontology ---------------------------------------------

    def build(self) -> None:
        p = self.params
        self.ontology = build_ontology(
            p.num_classes,
            p.num_properties,
            p.num_instances,
            p.branching_factor,
            p.skew_stop,
            self.rng,
        )
        add_type_triples(self.graph, self.ontology.instance_class)
        self._class_nodes = set(self.ontology.tree.nodes())
        for inst in self.ontology.instances():
            cls = self.ontology.instance_class[inst]
            self._by_class.setdefault(cls, []).append(inst)
        self._prop_by_uri = {d.property: d for d in self.ontology.properties}

    def _instances_within(self, ancestor: str) -> List[str]:
        if ancestor not in self._within_cache:
            pool: List[str] = []
            for cls in self.ontology.tree.subtree(ancestor):
                pool.extend(self._by_class.get(cls, ()))
            self._within_cache[ancestor] = pool
        return self._within_cache[ancestor]

    def _instances_exactly(self, cls: str) -> List[str]:
        return self._by_class.get(cls, [])

    # -- stage 2: expression binding -------------------------------------

    def bind(self) -> None:
        ontology = self.ontology
        if ontology is None:
            raise GenerationError("build() must run before bind()")
        properties = ontology.properties
        if len(properties) < 2 and any(
            f in self.families for f in BOUND_R_FAMILIES
        ):
            raise GenerationError(
                "need at least two properties: property #1 is reserved for "
                "relation-agnostic patterns"
            )

        instances = ontology.instances()
        if ("tc04" in self.families or "tc05" in self.families) and not instances:
            raise GenerationError("tc04/tc05 need at least one instance as focus")
        foci: List[str] = []
        for family in ("tc04", "tc05"):
            if family not in self.families:
                continue
            focus = self._draw_instance(instances, exclude=set(foci), family=family)
            foci.append(focus)
            self.exprs[family] = ConstructorExpr(family, e=focus)
        self._focus_e4 = self.exprs["tc04"].e if "tc04" in self.exprs else None
        self._focus_e5 = self.exprs["tc05"].e if "tc05" in self.exprs else None

        used: Set[str] = set()
        for family in BOUND_R_FAMILIES:
            if family not in self.families:
                continue
            self.exprs[family] = self._bind_family(family, used, foci)
            used.add(self.exprs[family].r)
            if family == "tc06":
                # the fixed object is itself off-limits as a pattern endpoint
                foci.append(self.exprs[family].e)

    def _draw_instance(self, pool: Sequence[str], exclude: Set[str], family: str) -> str:
        for _ in range(_MAX_BIND_TRIES):
            candidate = pool[int(self.rng.integers(0, len(pool)))]
            if candidate not in exclude:
                return candidate
        raise GenerationError(f"{family}: cannot draw a fresh focus instance")

    def _bind_family(
        self, family: str, used: Set[str], foci: List[str]
    ) -> ConstructorExpr:
        properties = self.ontology.properties
        min_card = self.params.min_card
        for _ in range(_MAX_BIND_TRIES):
            index = int(self.rng.integers(1, len(properties)))
            prop = properties[index]
            if prop.property in used:
                continue
            usable = [
                x for x in self._pattern_pool(family, prop) if x not in set(foci)
            ]
            if family in ("tc01", "tc02", "tc03", "tc07", "tc08"):
                needed = 1
            elif family == "tc06":
                needed = 1
            else:
                needed = min_card
            if family == "tc03" or len(usable) >= needed:
                return self._expr_for(family, prop, usable)
        raise GenerationError(
            f"{family}: no property with enough compatible instances"
        )

    def _pattern_pool(self, family: str, prop: PropertyDef) -> List[str]:
        """Instances usable as the pool-side endpoints of pattern edges."""
        if family in ("tc01", "tc06", "tc09"):
            return self._instances_within(prop.range)
        if family in ("tc02", "tc10"):
            return self._instances_within(prop.domain)
        if family in ("tc07", "tc11"):
            return self._instances_exactly(prop.range)
        if family in ("tc08", "tc12"):
            return self._instances_exactly(prop.domain)
        return []

    def _expr_for(
        self, family: str, prop: PropertyDef, usable: List[str]
    ) -> ConstructorExpr:
        r = prop.property
        min_card = self.params.min_card
        if family in ("tc01", "tc02", "tc03"):
            return ConstructorExpr(family, r=r)
        if family == "tc06":
            focus = usable[int(self.rng.integers(0, len(usable)))]
            return ConstructorExpr(family, r=r, e=focus)
        if family == "tc07":
            return ConstructorExpr(family, r=r, T=prop.range)
        if family == "tc08":
            return ConstructorExpr(family, r=r, T=prop.domain)
        if family == "tc09":
            return ConstructorExpr(family, r=r, min_card=min_card)
        if family == "tc10":
            return ConstructorExpr(family, r=r, min_card=min_card)
        if family == "tc11":
            return ConstructorExpr(family, r=r, T=prop.range, min_card=min_card)
        if family == "tc12":
            return ConstructorExpr(family, r=r, T=prop.domain, min_card=min_card)
        raise GenerationError(f"not a bound-relation family: {family}")

    # -- stage 3: entities of interest ------------------------------------

    def _mint(self, family: str, role: str, index: int) -> str:
        return f"{BASE}{family}/{role}/{index:04d}"

    def _type_entity(self, entity: str, within: str) -> None:
        """Type a minted entity with a uniform class of the given subtree."""
        subtree = self.ontology.tree.subtree(within)
        cls = subtree[int(self.rng.integers(0, len(subtree)))]
        self.graph.add(entity, self.graph.type_relation, cls)

    def _positive_type_root(self, family: str) -> str:
        """Subtree whose classes are compatible with the family's pattern."""
        expr = self.exprs[family]
        tree_root = self.ontology.tree.root
        if expr.r is None:
            return tree_root
        prop = self._prop_by_uri[expr.r]
        if family in ("tc01", "tc06", "tc07", "tc09", "tc11"):
            return prop.domain
        if family in ("tc02", "tc08", "tc10", "tc12"):
            return prop.range
        if family == "tc03":
            return prop.domain  # 'a' side; the 'b' side uses the range
        return tree_root

    def mint_examples(self) -> None:
        n = self.params.num_nodes_interest
        for family in self.families:
            expr = self.exprs[family]
            pos_root = self._positive_type_root(family)
            positives: List[str] = []
            for i in range(1, n + 1):
                entity = self._mint(family, "pos", i)
                if family == "tc03" and i > (n + 1) // 2:
                    # 'b' side of the pair carries the incoming edge
                    self._type_entity(
                        entity, self._prop_by_uri[expr.r].range
                    )
                else:
                    self._type_entity(entity, pos_root)
                positives.append(entity)
            negatives: List[str] = []
            neg_root = pos_root if expr.r is not None else self.ontology.tree.root
            for i in range(1, n + 1):
                entity = self._mint(family, "neg", i)
                self._type_entity(entity, neg_root)
                negatives.append(entity)
            self.positive_order[family] = positives
            self.positives[family] = set(positives)
            self.negatives[family] = negatives

    # -- protection -------------------------------------------------------

    def _try_add(self, subject: str, relation: str, object: str) -> bool:
        """Tentatively insert an edge; keep it only if no non-designated
        entity becomes a member of any active expression."""
        graph = self.graph
        if subject == object or graph.has(subject, relation, object):
            return False
        candidates = {subject, object}
        if object == self._focus_e5:
            candidates |= graph.predecessors(subject)
        if subject == self._focus_e5:
            candidates |= graph.successors(object)
        graph.add(subject, relation, object)
        for family in self.families:
            expr = self.exprs[family]
            designated = self.positives[family]
            for entity in candidates:
                # class nodes are never gold examples; the exactness
                # guarantee is scoped to instance-level entities
                if entity in self._class_nodes or entity in designated:
                    continue
                if matches(graph, expr, entity):
                    graph.discard(subject, relation, object)
                    return False
        return True

    def _add_pattern_edge(
        self, family: str, subject: str, relation: str, object: str
    ) -> None:
        if not self._try_add(subject, relation, object):
            raise GenerationError(
                f"{family}: pattern edge ({subject}, {relation}, {object}) "
                "conflicts with another test case"
            )

    def _draw_pattern_endpoint(
        self,
        family: str,
        pool: Sequence[str],
        make_edge,
        exclude: Set[str] = frozenset(),
    ) -> str:
        """Draw a pool endpoint until the resulting edge is accepted."""
        for _ in range(_MAX_EDGE_TRIES):
            endpoint = pool[int(self.rng.integers(0, len(pool)))]
            if endpoint in exclude:
                continue
            s, r, o = make_edge(endpoint)
            if self._try_add(s, r, o):
                return endpoint
        raise GenerationError(f"{family}: no acceptable pattern edge found")

    # -- stage 4: pattern edges -------------------------------------------

    def instantiate(self, family: str) -> None:
        expr = self.exprs[family]
        positives = self.positive_order[family]
        negatives = self.negatives[family]
        foci = {e for e in (self._focus_e4, self._focus_e5) if e is not None}
        if "tc06" in self.exprs:
            foci.add(self.exprs["tc06"].e)

        if family in ("tc01", "tc02"):
            prop = self._prop_by_uri[expr.r]
            root = prop.range if family == "tc01" else prop.domain
            pool = [x for x in self._instances_within(root) if x not in foci]
            for p in positives:
                if family == "tc01":
                    self._draw_pattern_endpoint(family, pool, lambda x: (p, expr.r, x))
                else:
                    self._draw_pattern_endpoint(family, pool, lambda x: (x, expr.r, p))
        elif family == "tc03":
            n = len(positives)
            if n < 2:
                raise GenerationError("tc03 needs at least 2 entities of interest")
            a_side = positives[: (n + 1) // 2]
            b_side = positives[(n + 1) // 2 :]
            for i, b in enumerate(b_side):
                self._add_pattern_edge(family, a_side[i], expr.r, b)
            if len(a_side) > len(b_side):
                self._add_pattern_edge(family, a_side[-1], expr.r, b_side[0])
        elif family == "tc04":
            half = len(positives) // 2
            for i, p in enumerate(positives):
                forward = i < half or len(positives) == 1
                prop = self._draw_connector(p, forward=forward)
                if forward:
                    self._add_pattern_edge(family, p, prop, expr.e)
                else:
                    self._add_pattern_edge(family, expr.e, prop, p)
        elif family == "tc05":
            glue = self.ontology.properties[0].property
            half = (len(positives) + 1) // 2
            forward_half, backward_half = positives[:half], positives[half:]
            mid_fwd = f"{BASE}tc05/mid/0001"
            self._type_entity(mid_fwd, self.ontology.tree.root)
            self.auxiliary.append(mid_fwd)
            self._add_pattern_edge(family, mid_fwd, glue, expr.e)
            for p in forward_half:
                self._add_pattern_edge(family, p, glue, mid_fwd)
            if backward_half:
                mid_bwd = f"{BASE}tc05/mid/0002"
                self._type_entity(mid_bwd, self.ontology.tree.root)
                self.auxiliary.append(mid_bwd)
                self._add_pattern_edge(family, expr.e, glue, mid_bwd)
                for p in backward_half:
                    self._add_pattern_edge(family, mid_bwd, glue, p)
        elif family == "tc06":
            for p in positives:
                self._add_pattern_edge(family, p, expr.r, expr.e)
        elif family in ("tc07", "tc08"):
            pool = [x for x in self._instances_exactly(expr.T) if x not in foci]
            for p in positives:
                if family == "tc07":
                    self._draw_pattern_endpoint(family, pool, lambda y: (p, expr.r, y))
                else:
                    self._draw_pattern_endpoint(family, pool, lambda y: (y, expr.r, p))
        elif family in ("tc09", "tc10", "tc11", "tc12"):
            prop = self._prop_by_uri[expr.r]
            if family == "tc09":
                pool = self._instances_within(prop.range)
            elif family == "tc10":
                pool = self._instances_within(prop.domain)
            elif family == "tc11":
                pool = self._instances_exactly(expr.T)
            else:
                pool = self._instances_exactly(expr.T)
            pool = [x for x in pool if x not in foci]
            outgoing = family in ("tc09", "tc11")

            def edge(entity):
                def make(x):
                    return (entity, expr.r, x) if outgoing else (x, expr.r, entity)

                return make

            for p in positives:
                chosen: Set[str] = set()
                for _ in range(expr.min_card):
                    endpoint = self._draw_pattern_endpoint(
                        family, pool, edge(p), exclude=chosen
                    )
                    chosen.add(endpoint)
            # negatives sit exactly one edge below the bound
            for neg in negatives:
                chosen = set()
                for _ in range(expr.min_card - 1):
                    endpoint = self._draw_pattern_endpoint(
                        family, pool, edge(neg), exclude=chosen
                    )
                    chosen.add(endpoint)
        else:
            raise GenerationError(f"unknown family: {family}")

    def _draw_connector(self, entity: str, forward: bool) -> str:
        """A property, never one bound to a family, whose range (forward)
        or domain (backward) admits the connection focus; the minted
        entity is then typed to fit the other side."""
        focus_cls = self.ontology.instance_class[self.exprs["tc04"].e]
        bound = {x.r for x in self.exprs.values() if x.r is not None}
        eligible = [
            d
            for d in self.ontology.properties
            if d.property not in bound
            and self.ontology.tree.is_within(
                focus_cls, d.range if forward else d.domain
            )
        ]
        if not eligible:
            raise GenerationError(
                "tc04: every property compatible with the focus is bound"
            )
        prop = eligible[int(self.rng.integers(0, len(eligible)))]
        self._retype(entity, prop.domain if forward else prop.range)
        return prop.property

    def _retype(self, entity: str, within: str) -> None:
        """Replace the minted entity's placeholder type so the connector
        property's other side is respected."""
        for cls in self.graph.types_of(entity):
            self.graph.discard(entity, self.graph.type_relation, cls)
        self._type_entity(entity, within)

    # -- stage 5: noise -----------------------------------------------------

    def _noise_properties(self, cls: str) -> List[PropertyDef]:
        if cls not in self._noise_props_cache:
            tree = self.ontology.tree
            self._noise_props_cache[cls] = [
                d
                for d in self.ontology.properties
                if tree.is_within(cls, d.domain)
            ]
        return self._noise_props_cache[cls]

    def populate_noise(self) -> None:
        max_triples = self.params.max_triples_per_node
        for family in self.families:
            for entity in self.positive_order[family] + self.negatives[family]:
                count = int(self.rng.integers(1, max_triples + 1))
                for _ in range(count):
                    self._noise_edge(entity)

    def _noise_edge(self, subject: str) -> bool:
        cls = next(iter(self.graph.types_of(subject)))
        props = self._noise_properties(cls)
        if not props:
            return False
        for _ in range(_MAX_NOISE_TRIES):
            prop = props[int(self.rng.integers(0, len(props)))]
            pool = self._instances_within(prop.range)
            if not pool:
                continue
            target = pool[int(self.rng.integers(0, len(pool)))]
            if self._try_add(subject, prop.property, target):
                return True
        return False

    # -- stage 6: validation -------------------------------------------------

    def validate(self) -> None:
        """The exactness sweep: members == designated positives, per family."""
        entities = (
            self.ontology.instances()
            + [e for f in self.families for e in self.positive_order[f]]
            + [e for f in self.families for e in self.negatives[f]]
            + self.auxiliary
        )
        for family in self.families:
            expr = self.exprs[family]
            members = {e for e in entities if matches(self.graph, expr, e)}
            if members != self.positives[family]:
                extra = sorted(members - self.positives[family])[:5]
                missing = sorted(self.positives[family] - members)[:5]
                raise GenerationError(
                    f"{family}: member sweep mismatch "
                    f"(extra={extra}, missing={missing})"
                )

    def run(self) -> SyntheticGoldStandard:
        self.build()
        self.bind()
        self.mint_examples()
        for family in self.families:
            self.instantiate(family)
        self.populate_noise()
        self.validate()
        # splits ride the same stream, so the whole artifact is one
        # deterministic function of the parameters
        splits = {
            family: split_stratified(
                self.positive_order[family], self.negatives[family], self.rng
            )
            for family in self.families
        }
        return SyntheticGoldStandard(
            params=self.params,
            graph=self.graph,
            ontology=self.ontology,
            exprs=dict(self.exprs),
            positives={f: list(self.positive_order[f]) for f in self.families},
            negatives={f: list(self.negatives[f]) for f in self.families},
            splits=splits,
            auxiliary=list(self.auxiliary),
            warnings=list(self.warnings),
        )


def generate_synthetic(
    params: SynthParams, families: Sequence[str] = FAMILIES
) -> SyntheticGoldStandard:
    """Run the full pipeline in memory."""
    return SyntheticGenerator(params, families).run()


def write_synthetic_gold_standard(
    gold: SyntheticGoldStandard, out_dir: str
) -> Tuple[str, Dict[str, object]]:
    """Write the versioned layout; returns (version directory, manifest)."""
    params = gold.params
    version_dir = os.path.join(out_dir, params.version)
    os.makedirs(version_dir, exist_ok=True)
    size = params.num_nodes_interest
    for family in sorted(gold.positives):
        examples = LabeledExamples(
            test_case=family,
            positives=set(gold.positives[family]),
            negatives=set(gold.negatives[family]),
            expr=gold.exprs[family],
        )
        write_case(
            version_dir, family, "synthetic", size, examples, gold.splits[family]
        )
    save_ntriples(gold.graph, os.path.join(version_dir, "graph.nt"))
    manifest = write_manifest(
        version_dir,
        {
            "subcommand": "generate-synthetic",
            "gold_standard_version": params.version,
            "parameters": asdict(params),
            "seed": params.seed,
            "bindings": {f: gold.exprs[f].to_text() for f in sorted(gold.exprs)},
            "warnings": gold.warnings,
            "outputs": digest_tree(version_dir),
        },
    )
    return version_dir, manifest


def generate_and_write(
    params: SynthParams, out_dir: str, families: Sequence[str] = FAMILIES
) -> Tuple[str, Dict[str, object]]:
    gold = generate_synthetic(params, families)
    return write_synthetic_gold_standard(gold, out_dir)
