"""Graph queries: role based element selection and material flow graphs."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .mapping import MappingConfig
from .rdf import RDF_TYPE, RDFS_SUBCLASSOF, Graph, Iri, Literal
from .vocab import DEFAULT_VOCAB, Vocabulary

DEFAULT_PORT_PATH = "AutomationMLInterfaceClassLib/AutomationMLBaseInterface/Port"
VALVE_STATE = "ValveState"


class Degree(str, enum.Enum):
    EXACT = "exact"
    DIRECT = "direct"
    TRANSITIVE = "transitive"


class FlowMode(str, enum.Enum):
    BIDIRECTIONAL = "bidirectional"
    VALVE_STATE = "valve-state"


@dataclass(frozen=True)
class RoleSelectionSpec:
    target_role: Iri
    degree: Degree = Degree.EXACT

    def __post_init__(self):
        if not self.target_role:
            raise ValueError("target role IRI must not be empty")
        object.__setattr__(self, "degree", Degree(self.degree))


@dataclass
class FlowGraph:
    edges: set[tuple[Iri, Iri]] = field(default_factory=set)

    def sorted_edges(self) -> list[tuple[Iri, Iri]]:
        return sorted(self.edges)

    def successors(self, node: Iri) -> set[Iri]:
        return {o for s, o in self.edges if s == node}

    def reachable(self, start: Iri) -> set[Iri]:
        return transitive_closure_edges(self.edges, start)


def transitive_closure(graph: Graph, predicate: Iri, start: Iri, *, inverse: bool = False) -> set[Iri]:
    """Reflexive-transitive closure of ``predicate`` from ``start``.

    With ``inverse`` the predicate is followed backwards.
    """
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        step = graph.subjects(predicate, node) if inverse else graph.objects(node, predicate)
        for nxt in step:
            if isinstance(nxt, Iri) and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def transitive_closure_edges(edges: Iterable[tuple[Iri, Iri]], start: Iri) -> set[Iri]:
    adjacency: dict[Iri, set[Iri]] = {}
    for s, o in edges:
        adjacency.setdefault(s, set()).add(o)
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in adjacency.get(queue.popleft(), ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def select_by_role(graph: Graph, spec: RoleSelectionSpec, vocab: Vocabulary = DEFAULT_VOCAB) -> list[Iri]:
    """InternalElements whose required role matches ``spec``; sorted by IRI."""
    selected = set()
    for element, role in graph.pairs(vocab.hasRoleRequirement):
        if not graph.is_a(element, vocab.InternalElement) or not isinstance(role, Iri):
            continue
        if role == spec.target_role:
            selected.add(element)
        elif spec.degree is Degree.DIRECT:
            if spec.target_role in graph.objects(role, RDFS_SUBCLASSOF):
                selected.add(element)
        elif spec.degree is Degree.TRANSITIVE:
            if spec.target_role in transitive_closure(graph, RDFS_SUBCLASSOF, role):
                selected.add(element)
    return sorted(selected)


def default_port_class(config: Optional[MappingConfig] = None) -> Iri:
    config = config or MappingConfig()
    return Iri(config.base_iri + DEFAULT_PORT_PATH)


def _port_interfaces(graph: Graph, port_class: Iri) -> set[Iri]:
    port_classes = transitive_closure(graph, RDFS_SUBCLASSOF, port_class, inverse=True)
    ports: set[Iri] = set()
    for cls in port_classes:
        ports |= graph.subjects(RDF_TYPE, cls)
    return ports


def _valve_states(graph: Graph, element: Iri, vocab: Vocabulary,
                  valve_state_type: Optional[Iri]) -> list[str]:
    """Values of the element's ValveState attributes (those that carry a value)."""
    states = []
    for attr in graph.objects(element, vocab.hasAttribute):
        kinds = graph.objects(attr, vocab.hasRefAttributeType)
        if valve_state_type is not None:
            matches = valve_state_type in kinds
        else:
            matches = any(Literal(VALVE_STATE) in graph.objects(k, vocab.hasName) for k in kinds)
        if not matches:
            continue
        for value in graph.objects(attr, vocab.hasAttributeValue):
            if isinstance(value, Literal):
                states.append(value.lexical)
    return states


def flow_graph(graph: Graph, port_class: Iri, mode: FlowMode = FlowMode.BIDIRECTIONAL,
               vocab: Vocabulary = DEFAULT_VOCAB, valve_state_type: Optional[Iri] = None) -> FlowGraph:
    """Material flow edges between InternalElements joined by linked port interfaces.

    In valve-state mode edges keep the link direction and an edge is dropped
    when its source has ValveState values and none of them is ``"true"``.
    """
    mode = FlowMode(mode)
    ports = _port_interfaces(graph, port_class)
    owner: dict[Iri, set[Iri]] = {}
    for element, iface in graph.pairs(vocab.hasInterface):
        if iface in ports and graph.is_a(element, vocab.InternalElement):
            owner.setdefault(iface, set()).add(element)

    edges: set[tuple[Iri, Iri]] = set()
    for i1, i2 in graph.pairs(vocab.isLinked):
        if i1 not in owner or i2 not in owner:
            continue
        for s in owner[i1]:
            for o in owner[i2]:
                edges.add((s, o))
                if mode is FlowMode.BIDIRECTIONAL:
                    edges.add((o, s))
    if mode is FlowMode.VALVE_STATE:
        blocked = set()
        for s in {s for s, _ in edges}:
            states = _valve_states(graph, s, vocab, valve_state_type)
            if states and "true" not in states:
                blocked.add(s)
        edges = {(s, o) for s, o in edges if s not in blocked}
    return FlowGraph(edges)


def export_flow_graph(flow: FlowGraph, vocab: Vocabulary = DEFAULT_VOCAB) -> Graph:
    out = Graph(prefixes={"aml": str(vocab.ns)})
    for s, o in flow.sorted_edges():
        out.add((s, vocab.flows, o))
    return out
