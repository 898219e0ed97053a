"""Direct structural mapping of a CAEX document to RDF triples."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .caex import (
    Attribute,
    AttributeType,
    AttributeTypeLib,
    Document,
    Element,
    ExternalInterface,
    InstanceHierarchy,
    InterfaceClass,
    InterfaceClassLib,
    InternalElement,
    InternalLink,
    ResolverIndex,
    RoleClass,
    RoleClassLib,
    StructuralError,
    SystemUnitClass,
    SystemUnitClassLib,
    resolve_link_partner,
    resolve_reference,
    walk,
)
from .parser import WARNING, ParseDiagnostic, index_document, references
from .rdf import OWL_CLASS, RDF_TYPE, RDFS_LABEL, XSD, XSD_STRING, Graph, Iri, Literal, iri_safe
from .vocab import DEFAULT_ONTOLOGY_NS, Vocabulary

# Standard XML Schema datatypes an AttributeDataType may name.
XSD_DATATYPES = frozenset({
    "string", "boolean", "decimal", "float", "double", "duration", "dateTime", "time", "date",
    "gYearMonth", "gYear", "gMonthDay", "gDay", "gMonth", "hexBinary", "base64Binary", "anyURI",
    "QName", "normalizedString", "token", "language", "NMTOKEN", "Name", "NCName", "ID",
    "integer", "nonPositiveInteger", "negativeInteger", "long", "int", "short", "byte",
    "nonNegativeInteger", "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte",
    "positiveInteger", "dateTimeStamp",
})

METACLASS = {
    InstanceHierarchy: "InstanceHierarchy",
    SystemUnitClassLib: "SystemUnitClassLib",
    RoleClassLib: "RoleClassLib",
    InterfaceClassLib: "InterfaceClassLib",
    AttributeTypeLib: "AttributeTypeLib",
    InternalElement: "InternalElement",
    SystemUnitClass: "SystemUnitClass",
    RoleClass: "RoleClass",
    InterfaceClass: "InterfaceClass",
    AttributeType: "AttributeType",
    Attribute: "Attribute",
    ExternalInterface: "ExternalInterface",
    InternalLink: "InternalLink",
}

CLASS_KINDS = (SystemUnitClass, RoleClass, InterfaceClass, AttributeType)


class MappingError(ValueError):
    """Fatal mapping failure; ``code`` is a stable identifier."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass
class MappingConfig:
    base_iri: str = "urn:aml:document/"
    ontology_ns: str = DEFAULT_ONTOLOGY_NS
    emit_labels: bool = True

    def __post_init__(self):
        if not self.base_iri.endswith(("/", "#")):
            raise ValueError(f"base_iri must end in '/' or '#': {self.base_iri!r}")
        Iri(self.base_iri)

    @property
    def vocab(self) -> Vocabulary:
        return Vocabulary(self.ontology_ns)


@dataclass(frozen=True)
class ExplicitMapping:
    """A MappingObject entry resolved to IRIs (owner element and role class)."""

    kind: str
    owner: Iri
    role: Iri
    element_name: str
    role_name: str


@dataclass
class StructureResult:
    graph: Graph
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)
    iris: dict[Element, Iri] = field(default_factory=dict)
    explicit_mappings: list[ExplicitMapping] = field(default_factory=list)


def datatype_for(data_type: Optional[str]) -> Iri:
    """XSD datatype named by an AttributeDataType, or xsd:string."""
    if not data_type:
        return XSD_STRING
    local = data_type
    if local.startswith(str(XSD)):
        local = local[len(str(XSD)):]
    elif ":" in local:
        prefix, _, local = local.partition(":")
        if prefix not in ("xs", "xsd"):
            return XSD_STRING
    return XSD.term(local) if local in XSD_DATATYPES else XSD_STRING


def assign_iri(element: Element, doc: Document, config: MappingConfig,
               index: Optional[ResolverIndex] = None) -> Iri:
    """IRI for an element: ID based when it has an ID, path based otherwise.

    Elements without an ID below an ID-bearing ancestor hang off that
    ancestor's IRI, e.g. ``<base><ie-id>/Length``.
    """
    if index is None:
        index = index_document(doc)
    if element not in index.parent_of:
        raise StructuralError(f"{type(element).__name__} {element.name!r} is not part of the document")
    names: list[str] = []
    node: Optional[Element] = element
    while node is not None and not getattr(node, "id", None):
        names.append(node.name)
        node = index.parent_of[node]
    tail = "/".join(iri_safe(n) for n in reversed(names))
    if node is None:
        return Iri(config.base_iri + tail)
    head = config.base_iri + iri_safe(node.id)
    return Iri(f"{head}/{tail}" if tail else head)


def _literal_props(vocab: Vocabulary, element) -> list[tuple[Iri, Literal]]:
    out = []
    if getattr(element, "id", None):
        out.append((vocab.hasID, Literal(element.id)))
    if isinstance(element, (Attribute, AttributeType)):
        datatype = datatype_for(element.data_type)
        if element.value is not None:
            out.append((vocab.hasAttributeValue, Literal(element.value, datatype)))
        if element.default_value is not None:
            out.append((vocab.hasDefaultValue, Literal(element.default_value, datatype)))
        if element.data_type:
            out.append((vocab.hasAttributeDataType, Literal(element.data_type)))
        if element.unit:
            out.append((vocab.hasUnit, Literal(element.unit)))
        if element.description:
            out.append((vocab.hasDescription, Literal(element.description)))
    return out


def _containment(vocab: Vocabulary, parent: Element, child: Element) -> Iri:
    if isinstance(child, Attribute) and not isinstance(parent, Attribute):
        return vocab.hasAttribute
    if isinstance(child, ExternalInterface) and not isinstance(parent, ExternalInterface):
        return vocab.hasInterface
    if isinstance(child, InternalLink):
        return vocab.hasInternalLink
    return vocab.hasPart


_REF_PROPERTY = {
    "RefAttributeType": "hasRefAttributeType",
    "RefBaseClassPath": "hasRefBaseClass",
    "RefBaseSystemUnitPath": "hasRefBaseSystemUnitClass",
    "SupportedRoleClass": "hasSupportedRoleClass",
    "RoleRequirements": "hasRoleRequirement",
}


def map_document(doc: Document, config: Optional[MappingConfig] = None,
                 index: Optional[ResolverIndex] = None) -> StructureResult:
    """Structural mapping with the bookkeeping the enrichment step needs."""
    config = config or MappingConfig()
    vocab = config.vocab
    index = index or index_document(doc)
    graph = Graph(prefixes=vocab.prefixes())
    result = StructureResult(graph)

    owners: dict[Iri, Element] = {}
    for element, _, path in walk(doc):
        iri = assign_iri(element, doc, config, index)
        if iri in owners:
            raise MappingError("IRI_COLLISION",
                               f"{path} and {index.path_of[owners[iri]]} both map to <{iri}>")
        owners[iri] = element
        result.iris[element] = iri

    def warn(message, location):
        result.diagnostics.append(ParseDiagnostic(WARNING, "DANGLING_REF", message, location))

    for element, parent, path in walk(doc):
        iri = result.iris[element]
        graph.add((iri, RDF_TYPE, getattr(vocab, METACLASS[type(element)])))
        if isinstance(element, CLASS_KINDS):
            graph.add((iri, RDF_TYPE, OWL_CLASS))
        graph.add((iri, vocab.hasName, Literal(element.name)))
        if config.emit_labels:
            graph.add((iri, RDFS_LABEL, Literal(element.name)))
        if parent is not None:
            graph.add((result.iris[parent], _containment(vocab, parent, element), iri))
        for prop, literal in _literal_props(vocab, element):
            graph.add((iri, prop, literal))

        for label, ref, kinds, allow_id in references(element):
            target = resolve_reference(index, ref, kinds, allow_id=allow_id)
            if target is None:
                warn(f"{label}={str(ref)!r} does not resolve; triple omitted", f"/{path}")
                continue
            graph.add((iri, getattr(vocab, _REF_PROPERTY[label]), result.iris[target]))

        if isinstance(element, InternalLink):
            for side, token, prop in (
                ("A", element.ref_partner_side_a, vocab.hasRefPartnerSideA),
                ("B", element.ref_partner_side_b, vocab.hasRefPartnerSideB),
            ):
                partner = resolve_link_partner(index, token)
                if partner is None:
                    warn(f"RefPartnerSide{side}={token!r} does not resolve; triple omitted", f"/{path}")
                    continue
                graph.add((iri, prop, result.iris[partner]))

        if isinstance(element, InternalElement):
            for mapping in element.name_mappings:
                role = resolve_reference(index, mapping.role, (RoleClass,))
                if role is None:
                    continue
                result.explicit_mappings.append(ExplicitMapping(
                    mapping.kind, iri, result.iris[role], mapping.element_name, mapping.role_name))
    return result


def map_structure(doc: Document, config: Optional[MappingConfig] = None,
                  diagnostics: Optional[list] = None) -> Graph:
    result = map_document(doc, config)
    if diagnostics is not None:
        diagnostics.extend(result.diagnostics)
    return result.graph
