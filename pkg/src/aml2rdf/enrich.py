"""Rule-based enrichment of a structurally mapped graph.

Each rule reads a snapshot of the graph, adds what it derives and returns the
set of triples that were actually new. Running a rule a second time therefore
returns an empty set.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .caex import Document
from .mapping import ExplicitMapping, MappingConfig, MappingError, map_document
from .parser import ParseDiagnostic
from .rdf import OWL_CLASS, RDF_TYPE, RDFS_SUBCLASSOF, Graph, Iri, Literal, Triple
from .vocab import DEFAULT_VOCAB, Vocabulary

BASE_ROLE_LIBRARY = "AutomationMLBaseRoleClassLib"


def _name(graph: Graph, node, vocab: Vocabulary) -> Optional[str]:
    names = sorted(o.lexical for o in graph.objects(node, vocab.hasName) if isinstance(o, Literal))
    return names[0] if names else None


def enrich_instance_types(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    """Elements become instances of the library class they are based on."""
    derived: set[Triple] = set()

    def typed(a, b):
        derived.add((a, RDF_TYPE, b))
        derived.add((b, RDF_TYPE, OWL_CLASS))

    for a, b in list(graph.pairs(vocab.hasRefAttributeType)):
        if graph.is_a(a, vocab.Attribute):
            typed(a, b)
    for a, b in list(graph.pairs(vocab.hasRefBaseClass)):
        if graph.is_a(a, vocab.ExternalInterface):
            typed(a, b)
    for a, b in list(graph.pairs(vocab.hasRefBaseSystemUnitClass)):
        # An InternalElement target is a mirror relation, not a type.
        if graph.is_a(a, vocab.InternalElement) and graph.is_a(b, vocab.SystemUnitClass):
            typed(a, b)
    return graph.update(sorted(derived))


def enrich_role_types(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    """Supporting a role makes the element an instance of it; requiring one does not."""
    derived = {
        (a, RDF_TYPE, b)
        for a, b in graph.pairs(vocab.hasSupportedRoleClass)
        if graph.is_a(a, vocab.InternalElement) or graph.is_a(a, vocab.SystemUnitClass)
    }
    return graph.update(sorted(derived))


def enrich_subclass(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    derived: set[Triple] = set()
    for a, b in graph.pairs(vocab.hasRefBaseClass):
        if any(graph.is_a(a, k) for k in (vocab.SystemUnitClass, vocab.InterfaceClass, vocab.RoleClass)):
            derived.add((a, RDFS_SUBCLASSOF, b))
    for a, b in graph.pairs(vocab.hasRefAttributeType):
        if graph.is_a(a, vocab.AttributeType):
            derived.add((a, RDFS_SUBCLASSOF, b))
    return graph.update(sorted(derived))


def enrich_links(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    derived: set[Triple] = set()
    for link in graph.instances(vocab.InternalLink):
        for a in graph.objects(link, vocab.hasRefPartnerSideA):
            for b in graph.objects(link, vocab.hasRefPartnerSideB):
                if graph.is_a(a, vocab.ExternalInterface) and graph.is_a(b, vocab.ExternalInterface):
                    derived.add((a, vocab.isLinked, b))
    return graph.update(sorted(derived))


def enrich_mirrors(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    derived: set[Triple] = set()
    for a, b in graph.pairs(vocab.hasRefBaseSystemUnitClass):
        if graph.is_a(a, vocab.InternalElement) and graph.is_a(b, vocab.InternalElement):
            derived.add((a, vocab.hasMasterObject, b))
            derived.add((b, vocab.hasMirrorObject, a))
    return graph.update(sorted(derived))


def base_roles(graph: Graph, role_name: str, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Iri]:
    """RoleClasses called ``role_name`` that live in an AutomationML base role library."""
    found = set()
    for role in graph.instances(vocab.RoleClass):
        if _name(graph, role, vocab) != role_name:
            continue
        seen = {role}
        frontier = [role]
        while frontier:
            node = frontier.pop()
            for parent in graph.subjects(vocab.hasPart, node):
                if parent in seen:
                    continue
                seen.add(parent)
                if graph.is_a(parent, vocab.RoleClassLib):
                    if (_name(graph, parent, vocab) or "").startswith(BASE_ROLE_LIBRARY):
                        found.add(role)
                else:
                    frontier.append(parent)
    return found


def enrich_facets_groups(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    derived: set[Triple] = set()
    for role_name, cls, prop in (("Facet", vocab.Facet, vocab.hasFacet), ("Group", vocab.Group, vocab.hasGroup)):
        for role in base_roles(graph, role_name, vocab):
            for b in graph.subjects(vocab.hasRoleRequirement, role):
                if not graph.is_a(b, vocab.InternalElement):
                    continue
                for a in graph.subjects(vocab.hasPart, b):
                    if graph.is_a(a, vocab.InternalElement) or graph.is_a(a, vocab.SystemUnitClass):
                        derived.add((b, RDF_TYPE, cls))
                        derived.add((a, prop, b))
    return graph.update(sorted(derived))


def _class_nodes(graph: Graph, vocab: Vocabulary) -> set[Iri]:
    nodes: set[Iri] = set()
    for kind in (vocab.SystemUnitClass, vocab.RoleClass, vocab.InterfaceClass, vocab.AttributeType):
        nodes |= graph.instances(kind)
    return nodes


def topological_classes(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> list[Iri]:
    """Library classes ordered so every base class precedes its subclasses.

    Raises MappingError(CYCLIC_HIERARCHY) if subClassOf loops.
    """
    classes = _class_nodes(graph, vocab)
    parents = {c: sorted(p for p in graph.objects(c, RDFS_SUBCLASSOF) if p in classes) for c in classes}
    order: list[Iri] = []
    state: dict[Iri, int] = {}  # 1 = on stack, 2 = done
    for start in sorted(classes):
        if state.get(start) == 2:
            continue
        stack = [(start, iter(parents[start]))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                state[node] = 2
                order.append(node)
            elif state.get(nxt) == 1:
                cycle = [n for n, _ in stack] + [nxt]
                raise MappingError("CYCLIC_HIERARCHY", " -> ".join(cycle))
            elif state.get(nxt) is None:
                state[nxt] = 1
                stack.append((nxt, iter(parents[nxt])))
    return order


def enrich_inheritance(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB) -> set[Triple]:
    """Subclasses inherit attributes and interfaces they do not override by name."""
    added: set[Triple] = set()
    order = topological_classes(graph, vocab)
    for cls in order:
        for base in sorted(p for p in graph.objects(cls, RDFS_SUBCLASSOF) if p in order):
            for prop in (vocab.hasAttribute, vocab.hasInterface):
                owned = {_name(graph, m, vocab) for m in graph.objects(cls, prop)}
                for member in sorted(graph.objects(base, prop)):
                    name = _name(graph, member, vocab)
                    if name is None or name in owned:
                        continue
                    owned.add(name)
                    triple = (cls, prop, member)
                    if graph.add(triple):
                        added.add(triple)
    return added


def enrich_mappings(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB,
                    explicit: Iterable[ExplicitMapping] = ()) -> set[Triple]:
    """Pair same-named members of an element and the role it requires."""
    derived: set[Triple] = set()
    members = {"attribute": (vocab.hasAttribute, vocab.Attribute),
               "interface": (vocab.hasInterface, vocab.ExternalInterface)}

    def named(owner, kind) -> dict[str, list]:
        prop, cls = members[kind]
        out: dict[str, list] = {}
        for m in graph.objects(owner, prop):
            if graph.is_a(m, cls):
                out.setdefault(_name(graph, m, vocab), []).append(m)
        return out

    for a, b in graph.pairs(vocab.hasRoleRequirement):
        if not (graph.is_a(a, vocab.InternalElement) and graph.is_a(b, vocab.RoleClass)):
            continue
        for kind in members:
            mine, theirs = named(a, kind), named(b, kind)
            for name in mine.keys() & theirs.keys():
                if name is None:
                    continue
                for c in mine[name]:
                    for d in theirs[name]:
                        derived.add((c, vocab.hasMappingObject, d))
    for m in explicit:
        if (m.owner, vocab.hasRoleRequirement, m.role) not in graph:
            continue
        for c in named(m.owner, m.kind).get(m.element_name, ()):
            for d in named(m.role, m.kind).get(m.role_name, ()):
                derived.add((c, vocab.hasMappingObject, d))
    return graph.update(sorted(derived))


Rule = Callable[[Graph, Vocabulary], set]

# Fixed order; name mapping runs last so inherited role members take part.
PIPELINE: tuple[tuple[str, Rule], ...] = (
    ("instance_types", enrich_instance_types),
    ("role_types", enrich_role_types),
    ("subclass", enrich_subclass),
    ("links", enrich_links),
    ("mirrors", enrich_mirrors),
    ("facets_groups", enrich_facets_groups),
    ("inheritance", enrich_inheritance),
    ("mappings", enrich_mappings),
)


def enrich(graph: Graph, vocab: Vocabulary = DEFAULT_VOCAB,
           explicit: Iterable[ExplicitMapping] = ()) -> dict[str, set[Triple]]:
    """Run every rule in pipeline order; returns each rule's added triples."""
    deltas = {}
    for name, rule in PIPELINE:
        if rule is enrich_mappings:
            deltas[name] = enrich_mappings(graph, vocab, explicit)
        else:
            deltas[name] = rule(graph, vocab)
    return deltas


def map_full(doc: Document, config: Optional[MappingConfig] = None) -> tuple[Graph, list[ParseDiagnostic]]:
    """Structural mapping followed by all enrichment rules."""
    config = config or MappingConfig()
    result = map_document(doc, config)
    enrich(result.graph, config.vocab, result.explicit_mappings)
    return result.graph, result.diagnostics
