"""Synthetic ontology generation: class tree, properties, instances.

The ontology is built in three stages driven by a single sequential
random stream:

1. a rooted class tree where classes are attached breadth-first, at
   most ``branching_factor`` children per class, yielding the unique
   complete b-ary tree shape on ``num_classes`` nodes;
2. properties with a domain and range class each, drawn by starting at
   a uniformly random class and descending to a random child while a
   uniform draw exceeds ``stop_prob``; the first property is anchored
   at the root on both sides so every instance can participate in at
   least one statement;
3. instances, each typed with one uniformly random class.

Only instance-level triples (the type assertions) are materialized
into the knowledge graph; the schema itself travels in the manifest.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from kgcbench.graph import KnowledgeGraph

BASE = "http://kgcbench.org/synth/"


def class_uri(index: int) -> str:
    return f"{BASE}class/{index:04d}"


def property_uri(index: int) -> str:
    return f"{BASE}property/{index:04d}"


def instance_uri(index: int) -> str:
    return f"{BASE}instance/{index:05d}"


@dataclass
class ClassTree:
    """A rooted class hierarchy with ordered children lists."""

    root: str
    children: Dict[str, List[str]]
    parent: Dict[str, Optional[str]]

    def nodes(self) -> List[str]:
        order = [self.root]
        queue = deque([self.root])
        while queue:
            current = queue.popleft()
            for child in self.children.get(current, []):
                order.append(child)
                queue.append(child)
        return order

    def __len__(self) -> int:
        return len(self.parent)

    def depth(self) -> int:
        deepest = 0
        queue = deque([(self.root, 0)])
        while queue:
            node, level = queue.popleft()
            deepest = max(deepest, level)
            for child in self.children.get(node, []):
                queue.append((child, level + 1))
        return deepest

    def subtree(self, node: str) -> List[str]:
        """The node itself plus all descendants, in breadth-first order."""
        order = [node]
        queue = deque([node])
        while queue:
            current = queue.popleft()
            for child in self.children.get(current, []):
                order.append(child)
                queue.append(child)
        return order

    def is_within(self, node: str, ancestor: str) -> bool:
        """True iff ``ancestor`` lies on the path from ``node`` to the root."""
        current: Optional[str] = node
        while current is not None:
            if current == ancestor:
                return True
            current = self.parent[current]
        return False


@dataclass(frozen=True)
class PropertyDef:
    """A generated property with one domain class and one range class."""

    property: str
    domain: str
    range: str


@dataclass
class Ontology:
    tree: ClassTree
    properties: List[PropertyDef]
    instance_class: Dict[str, str] = field(default_factory=dict)

    def instances(self) -> List[str]:
        return sorted(self.instance_class)

    def instances_within(self, ancestor: str) -> List[str]:
        """Instances whose class lies in the subtree rooted at ``ancestor``."""
        allowed = set(self.tree.subtree(ancestor))
        return [
            inst for inst in self.instances() if self.instance_class[inst] in allowed
        ]

    def instances_typed_exactly(self, cls: str) -> List[str]:
        return [inst for inst in self.instances() if self.instance_class[inst] == cls]


def generate_class_tree(
    num_classes: int, branching_factor: int, rng: np.random.Generator
) -> ClassTree:
    """Attach classes breadth-first, ``branching_factor`` per node.

    The root label is a uniformly random draw from the generated class
    URIs; the remaining classes are attached in generation order, so
    the shape is always the complete b-ary tree on ``num_classes``
    nodes while labels vary with the seed.
    """
    if num_classes < 1:
        raise ValueError("num_classes must be >= 1")
    if branching_factor < 1:
        raise ValueError("branching_factor must be >= 1")
    cls_uris = [class_uri(i + 1) for i in range(num_classes)]
    root = cls_uris[int(rng.integers(0, num_classes))]
    children: Dict[str, List[str]] = {}
    parent: Dict[str, Optional[str]] = {root: None}
    work_list: deque = deque()
    current = root
    attached = 0
    for uri in cls_uris:
        if uri == root:
            continue
        if attached == branching_factor:
            current = work_list.popleft()
            attached = 0
        children.setdefault(current, []).append(uri)
        parent[uri] = current
        attached += 1
        work_list.append(uri)
    return ClassTree(root=root, children=children, parent=parent)


def draw_domain_range(
    tree: ClassTree, stop_prob: float, rng: np.random.Generator
) -> str:
    """Start at a uniformly random class and randomly descend.

    At each step a uniform draw above ``stop_prob`` descends to a
    uniformly random child; the walk stops at leaves or when the draw
    falls at or below ``stop_prob``.
    """
    if not 0.0 < stop_prob <= 1.0:
        raise ValueError("stop_prob must be in (0, 1]")
    nodes = tree.nodes()
    result = nodes[int(rng.integers(0, len(nodes)))]
    while rng.random() > stop_prob:
        child_list = tree.children.get(result, [])
        if not child_list:
            break
        result = child_list[int(rng.integers(0, len(child_list)))]
    return result


def generate_properties(
    num_properties: int,
    tree: ClassTree,
    rng: np.random.Generator,
    stop_prob: float = 0.25,
) -> List[PropertyDef]:
    """Property #1 is rooted both ways; the rest are drawn randomly."""
    if num_properties < 1:
        raise ValueError("num_properties must be >= 1")
    defs = [PropertyDef(property_uri(1), tree.root, tree.root)]
    for index in range(2, num_properties + 1):
        domain = draw_domain_range(tree, stop_prob, rng)
        range_ = draw_domain_range(tree, stop_prob, rng)
        defs.append(PropertyDef(property_uri(index), domain, range_))
    return defs


def populate_classes(
    num_instances: int, tree: ClassTree, rng: np.random.Generator
) -> Dict[str, str]:
    """Mint instances, each typed with one uniformly random class."""
    if num_instances < 0:
        raise ValueError("num_instances must be >= 0")
    nodes = tree.nodes()
    assignment: Dict[str, str] = {}
    for index in range(1, num_instances + 1):
        cls = nodes[int(rng.integers(0, len(nodes)))]
        assignment[instance_uri(index)] = cls
    return assignment


def add_type_triples(
    graph: KnowledgeGraph, instance_class: Dict[str, str]
) -> None:
    for instance in sorted(instance_class):
        graph.add(instance, graph.type_relation, instance_class[instance])


def build_ontology(
    num_classes: int,
    num_properties: int,
    num_instances: int,
    branching_factor: int,
    skew_stop: float,
    rng: np.random.Generator,
) -> Ontology:
    tree = generate_class_tree(num_classes, branching_factor, rng)
    properties = generate_properties(num_properties, tree, rng, stop_prob=skew_stop)
    instance_class = populate_classes(num_instances, tree, rng)
    return Ontology(tree=tree, properties=properties, instance_class=instance_class)


def level_sizes(tree: ClassTree) -> List[int]:
    """Number of classes per depth level, root first."""
    sizes: List[int] = []
    level: Sequence[str] = [tree.root]
    while level:
        sizes.append(len(level))
        next_level: List[str] = []
        for node in level:
            next_level.extend(tree.children.get(node, []))
        level = next_level
    return sizes
