"""Fixed IRI vocabulary of the AutomationML ontology."""

from __future__ import annotations

from .rdf import OWL, RDF, RDFS, XSD, Iri, Namespace

DEFAULT_ONTOLOGY_NS = "https://w3id.org/hsu-aut/AutomationML#"

CLASSES = (
    "InternalElement",
    "SystemUnitClass",
    "RoleClass",
    "InterfaceClass",
    "AttributeType",
    "Attribute",
    "ExternalInterface",
    "InternalLink",
    "InstanceHierarchy",
    "Facet",
    "Group",
    "SystemUnitClassLib",
    "RoleClassLib",
    "InterfaceClassLib",
    "AttributeTypeLib",
)

OBJECT_PROPERTIES = (
    "hasPart",
    "hasAttribute",
    "hasInterface",
    "hasInternalLink",
    "hasRefBaseClass",
    "hasRefAttributeType",
    "hasRefBaseSystemUnitClass",
    "hasRoleRequirement",
    "hasSupportedRoleClass",
    "hasRefPartnerSideA",
    "hasRefPartnerSideB",
    "isLinked",
    "hasMasterObject",
    "hasMirrorObject",
    "hasMappingObject",
    "hasFacet",
    "hasGroup",
    "flows",
)

DATA_PROPERTIES = (
    "hasName",
    "hasID",
    "hasAttributeValue",
    "hasDefaultValue",
    "hasAttributeDataType",
    "hasUnit",
    "hasDescription",
)


class Vocabulary:
    """All ontology terms as attributes, e.g. ``vocab.hasAttribute``.

    The term set is closed; only the namespace can change.
    """

    type = RDF.type
    label = RDFS.label
    subClassOf = RDFS.subClassOf
    Class = OWL.Class

    def __init__(self, namespace: str = DEFAULT_ONTOLOGY_NS):
        if not namespace.endswith(("#", "/")):
            raise ValueError(f"ontology namespace must end in '#' or '/': {namespace!r}")
        self.ns = Namespace(namespace)
        for name in CLASSES + OBJECT_PROPERTIES + DATA_PROPERTIES:
            setattr(self, name, self.ns.term(name))

    def __repr__(self) -> str:
        return f"Vocabulary({str(self.ns)!r})"

    def terms(self) -> dict[str, Iri]:
        return {name: getattr(self, name) for name in CLASSES + OBJECT_PROPERTIES + DATA_PROPERTIES}

    def prefixes(self) -> dict[str, str]:
        return {"aml": str(self.ns), "rdf": str(RDF), "rdfs": str(RDFS), "owl": str(OWL), "xsd": str(XSD)}


DEFAULT_VOCAB = Vocabulary()
