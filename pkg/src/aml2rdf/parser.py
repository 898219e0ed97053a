"""AutomationML (CAEX 3.0) XML ingestion."""

from __future__ import annotations

import io
import logging
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import BinaryIO, Optional, Union

from .caex import (
    Attribute,
    AttributeType,
    AttributeTypeLib,
    Document,
    Element,
    ElementId,
    ExternalInterface,
    InstanceHierarchy,
    InterfaceClass,
    InterfaceClassLib,
    InternalElement,
    InternalLink,
    NameMapping,
    RefPath,
    ResolverIndex,
    RoleClass,
    RoleClassLib,
    SystemUnitClass,
    SystemUnitClassLib,
    resolve_link_partner,
    resolve_reference,
    walk,
)

logger = logging.getLogger(__name__)

ERROR = "error"
WARNING = "warning"

SUPPORTED_SCHEMA_VERSION = "3.0"

PILLARS = (
    "InstanceHierarchy",
    "SystemUnitClassLib",
    "RoleClassLib",
    "InterfaceClassLib",
    "AttributeTypeLib",
)

# CAEX bookkeeping elements that carry nothing the mapping uses.
_IGNORED = frozenset({
    "Description",
    "Version",
    "Revision",
    "Copyright",
    "AdditionalInformation",
    "SourceDocumentInformation",
    "SuperiorStandardVersion",
    "SourceObjectInformation",
    "ExternalReference",
    "RefSemantic",
    "Constraint",
})


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    code: str
    message: str
    location: str = ""

    def __str__(self) -> str:
        where = f" at {self.location}" if self.location else ""
        return f"{self.severity}: {self.code}{where}: {self.message}"


class CaexParseError(ValueError):
    """Fatal problem while reading a document; ``diagnostics`` has the details."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity == ERROR]
        super().__init__("; ".join(str(d) for d in errors) or "parse failed")

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics if d.severity == ERROR]


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if "}" in tag else tag


class _Reader:
    def __init__(self):
        self.diagnostics: list[ParseDiagnostic] = []
        self.seen_ids: dict[str, str] = {}

    def report(self, severity, code, message, location=""):
        self.diagnostics.append(ParseDiagnostic(severity, code, message, location))

    # -- helpers ---------------------------------------------------------

    def _name(self, node, where):
        name = node.get("Name")
        if not name:
            self.report(ERROR, "MISSING_NAME", f"{_local(node.tag)} has no Name", where)
            return ""
        return name

    def _id(self, node, where) -> ElementId:
        value = node.get("ID")
        if not value:
            self.report(ERROR, "MISSING_MANDATORY_ID", f"{_local(node.tag)} has no ID", where)
            return ElementId("")
        if value in self.seen_ids:
            self.report(ERROR, "DUPLICATE_ID",
                        f"ID {value!r} already used at {self.seen_ids[value]}", where)
        else:
            self.seen_ids[value] = where
        return ElementId(value)

    def _ref(self, node, xml_attr, where) -> Optional[RefPath]:
        text = node.get(xml_attr)
        if text is None or text == "":
            return None
        try:
            return RefPath.parse(text)
        except ValueError as exc:
            self.report(ERROR, "INVALID_PATH", f"{xml_attr}={text!r}: {exc}", where)
            return None

    def _unknown(self, child, where):
        tag = _local(child.tag)
        if tag not in _IGNORED:
            self.report(WARNING, "UNKNOWN_ELEMENT", f"dropped unsupported element <{tag}>", where)

    def _check_siblings(self, children, where):
        names: set[str] = set()
        for child in children:
            if not child.name:
                continue
            if child.name in names:
                self.report(ERROR, "DUPLICATE_NAME",
                            f"two children named {child.name!r}", where)
            names.add(child.name)

    @staticmethod
    def _text(node, tag) -> Optional[str]:
        for child in node:
            if _local(child.tag) == tag:
                return child.text if child.text is not None else ""
        return None

    # -- element readers -------------------------------------------------

    def attribute(self, node, where) -> Attribute:
        name = self._name(node, where)
        here = f"{where}/{name}"
        children = []
        for child in node:
            tag = _local(child.tag)
            if tag == "Attribute":
                children.append(self.attribute(child, here))
            elif tag in ("Value", "DefaultValue", "Description"):
                pass
            else:
                self._unknown(child, here)
        self._check_siblings(children, here)
        return Attribute(
            name=name,
            ref_attribute_type=self._ref(node, "RefAttributeType", here),
            value=self._text(node, "Value"),
            default_value=self._text(node, "DefaultValue"),
            data_type=node.get("AttributeDataType"),
            unit=node.get("Unit"),
            description=self._text(node, "Description"),
            children=tuple(children),
        )

    def interface(self, node, where) -> ExternalInterface:
        name = self._name(node, where)
        here = f"{where}/{name}"
        iface_id = self._id(node, here)
        children, attributes = [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "ExternalInterface":
                children.append(self.interface(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes], here)
        return ExternalInterface(
            id=iface_id,
            name=name,
            ref_base_class=self._ref(node, "RefBaseClassPath", here),
            children=tuple(children),
            attributes=tuple(attributes),
        )

    def link(self, node, where) -> InternalLink:
        name = self._name(node, where)
        here = f"{where}/{name}"
        side_a = node.get("RefPartnerSideA") or ""
        side_b = node.get("RefPartnerSideB") or ""
        if not side_a or not side_b:
            self.report(ERROR, "INVALID_LINK", "InternalLink needs both partner sides", here)
        elif side_a == side_b:
            self.report(ERROR, "INVALID_LINK", "InternalLink connects an interface to itself", here)
        return InternalLink(name=name, ref_partner_side_a=side_a, ref_partner_side_b=side_b)

    def _role_requirement(self, node, where, mappings):
        role = self._ref(node, "RefBaseRoleClassPath", where)
        if role is None:
            self.report(ERROR, "INVALID_PATH", "RoleRequirements without RefBaseRoleClassPath", where)
            return None
        for child in node:
            tag = _local(child.tag)
            if tag == "MappingObject":
                for entry in child:
                    entry_tag = _local(entry.tag)
                    if entry_tag == "AttributeNameMapping":
                        mappings.append(NameMapping(
                            "attribute", role,
                            entry.get("SystemUnitAttributeName", ""),
                            entry.get("RoleAttributeName", "")))
                    elif entry_tag == "InterfaceNameMapping":
                        mappings.append(NameMapping(
                            "interface", role,
                            entry.get("SystemUnitInterfaceName", ""),
                            entry.get("RoleInterfaceName", "")))
                    else:
                        self._unknown(entry, where)
            else:
                self._unknown(child, where)
        return role

    def _supported_role(self, node, where):
        role = self._ref(node, "RefRoleClassPath", where)
        if role is None:
            self.report(ERROR, "INVALID_PATH", "SupportedRoleClass without RefRoleClassPath", where)
        for child in node:
            self._unknown(child, where)
        return role

    def internal_element(self, node, where) -> InternalElement:
        name = self._name(node, where)
        here = f"{where}/{name}"
        ie_id = self._id(node, here)
        children, attributes, interfaces, links = [], [], [], []
        supported, required, mappings = [], [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "InternalElement":
                children.append(self.internal_element(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            elif tag == "ExternalInterface":
                interfaces.append(self.interface(child, here))
            elif tag == "InternalLink":
                links.append(self.link(child, here))
            elif tag == "SupportedRoleClass":
                role = self._supported_role(child, here)
                if role is not None:
                    supported.append(role)
            elif tag == "RoleRequirements":
                role = self._role_requirement(child, here, mappings)
                if role is not None:
                    required.append(role)
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes, *interfaces, *links], here)
        return InternalElement(
            id=ie_id,
            name=name,
            ref_base_system_unit_path=self._ref(node, "RefBaseSystemUnitPath", here),
            children=tuple(children),
            attributes=tuple(attributes),
            external_interfaces=tuple(interfaces),
            internal_links=tuple(links),
            supported_role_classes=tuple(supported),
            role_requirements=tuple(required),
            name_mappings=tuple(mappings),
        )

    def system_unit_class(self, node, where) -> SystemUnitClass:
        name = self._name(node, where)
        here = f"{where}/{name}"
        children, attributes, interfaces, elements, links, supported = [], [], [], [], [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "SystemUnitClass":
                children.append(self.system_unit_class(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            elif tag == "ExternalInterface":
                interfaces.append(self.interface(child, here))
            elif tag == "InternalElement":
                elements.append(self.internal_element(child, here))
            elif tag == "InternalLink":
                links.append(self.link(child, here))
            elif tag == "SupportedRoleClass":
                role = self._supported_role(child, here)
                if role is not None:
                    supported.append(role)
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes, *interfaces, *elements, *links], here)
        return SystemUnitClass(
            name=name,
            ref_base_class=self._ref(node, "RefBaseClassPath", here),
            children=tuple(children),
            attributes=tuple(attributes),
            external_interfaces=tuple(interfaces),
            internal_elements=tuple(elements),
            supported_role_classes=tuple(supported),
            internal_links=tuple(links),
        )

    def role_class(self, node, where) -> RoleClass:
        name = self._name(node, where)
        here = f"{where}/{name}"
        children, attributes, interfaces = [], [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "RoleClass":
                children.append(self.role_class(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            elif tag == "ExternalInterface":
                interfaces.append(self.interface(child, here))
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes, *interfaces], here)
        return RoleClass(
            name=name,
            ref_base_class=self._ref(node, "RefBaseClassPath", here),
            children=tuple(children),
            attributes=tuple(attributes),
            external_interfaces=tuple(interfaces),
        )

    def interface_class(self, node, where) -> InterfaceClass:
        name = self._name(node, where)
        here = f"{where}/{name}"
        children, attributes = [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "InterfaceClass":
                children.append(self.interface_class(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes], here)
        return InterfaceClass(
            name=name,
            ref_base_class=self._ref(node, "RefBaseClassPath", here),
            children=tuple(children),
            attributes=tuple(attributes),
        )

    def attribute_type(self, node, where) -> AttributeType:
        name = self._name(node, where)
        here = f"{where}/{name}"
        children, attributes = [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "AttributeType":
                children.append(self.attribute_type(child, here))
            elif tag == "Attribute":
                attributes.append(self.attribute(child, here))
            elif tag in ("Value", "DefaultValue", "Description"):
                pass
            else:
                self._unknown(child, here)
        self._check_siblings([*children, *attributes], here)
        return AttributeType(
            name=name,
            ref_base_class=self._ref(node, "RefAttributeType", here),
            children=tuple(children),
            attributes=tuple(attributes),
            value=self._text(node, "Value"),
            default_value=self._text(node, "DefaultValue"),
            data_type=node.get("AttributeDataType"),
            unit=node.get("Unit"),
            description=self._text(node, "Description"),
        )

    def pillar(self, node, where):
        tag = _local(node.tag)
        name = self._name(node, where)
        here = f"{where}/{name}"
        if tag == "InstanceHierarchy":
            member_tag, reader, factory = "InternalElement", self.internal_element, InstanceHierarchy
        elif tag == "SystemUnitClassLib":
            member_tag, reader, factory = "SystemUnitClass", self.system_unit_class, SystemUnitClassLib
        elif tag == "RoleClassLib":
            member_tag, reader, factory = "RoleClass", self.role_class, RoleClassLib
        elif tag == "InterfaceClassLib":
            member_tag, reader, factory = "InterfaceClass", self.interface_class, InterfaceClassLib
        else:
            member_tag, reader, factory = "AttributeType", self.attribute_type, AttributeTypeLib
        members = []
        for child in node:
            if _local(child.tag) == member_tag:
                members.append(reader(child, here))
            else:
                self._unknown(child, here)
        self._check_siblings(members, here)
        return factory(name, tuple(members))

    def document(self, root, source_name) -> Document:
        tag = _local(root.tag)
        buckets: dict[str, list] = {p: [] for p in PILLARS}
        version = None
        if tag == "CAEXFile":
            version = root.get("SchemaVersion")
            if version != SUPPORTED_SCHEMA_VERSION:
                self.report(WARNING, "VERSION_MISMATCH",
                            f"SchemaVersion {version!r}, expected {SUPPORTED_SCHEMA_VERSION!r}",
                            "/CAEXFile")
            for child in root:
                child_tag = _local(child.tag)
                if child_tag in buckets:
                    buckets[child_tag].append(self.pillar(child, ""))
                else:
                    self._unknown(child, "/CAEXFile")
        elif tag in buckets:
            buckets[tag].append(self.pillar(root, ""))
        else:
            self.report(ERROR, "NOT_CAEX", f"root element <{tag}> is not a CAEX document", "/")
        # Top-level names share one path namespace across all five pillars.
        self._check_siblings([p for group in buckets.values() for p in group], "/")
        return Document(
            instance_hierarchies=tuple(buckets["InstanceHierarchy"]),
            suc_libs=tuple(buckets["SystemUnitClassLib"]),
            rc_libs=tuple(buckets["RoleClassLib"]),
            ic_libs=tuple(buckets["InterfaceClassLib"]),
            at_libs=tuple(buckets["AttributeTypeLib"]),
            source_name=source_name,
            schema_version=version,
        )


def index_document(doc: Document) -> ResolverIndex:
    index = ResolverIndex()
    for element, parent, path in walk(doc):
        index.path_of[element] = path
        index.parent_of[element] = parent
        index.by_path.setdefault(str(path), element)
        element_id = getattr(element, "id", None)
        if element_id:
            index.by_id.setdefault(element_id, element)
    return index


# Which element kinds each reference field may point at.
_REF_TARGETS = {
    "RefAttributeType": (AttributeType,),
    "RefBaseClassPath(SystemUnitClass)": (SystemUnitClass,),
    "RefBaseClassPath(RoleClass)": (RoleClass,),
    "RefBaseClassPath(InterfaceClass)": (InterfaceClass,),
    "RefBaseClassPath(ExternalInterface)": (InterfaceClass,),
    "RefBaseSystemUnitPath": (SystemUnitClass, InternalElement),
    "RoleClass": (RoleClass,),
}


def references(element: Element):
    """Yield ``(label, ref, target_kinds, allow_id)`` for each outgoing reference path."""
    if isinstance(element, (Attribute, AttributeType)):
        ref = element.ref_attribute_type if isinstance(element, Attribute) else element.ref_base_class
        if ref is not None:
            yield "RefAttributeType", ref, _REF_TARGETS["RefAttributeType"], False
    elif isinstance(element, (SystemUnitClass, RoleClass, InterfaceClass, ExternalInterface)):
        if element.ref_base_class is not None:
            key = f"RefBaseClassPath({type(element).__name__})"
            yield "RefBaseClassPath", element.ref_base_class, _REF_TARGETS[key], False
    if isinstance(element, InternalElement) and element.ref_base_system_unit_path is not None:
        # Mirror objects name their master by ID rather than by path.
        yield ("RefBaseSystemUnitPath", element.ref_base_system_unit_path,
               _REF_TARGETS["RefBaseSystemUnitPath"], True)
    for role in getattr(element, "supported_role_classes", ()):
        yield "SupportedRoleClass", role, _REF_TARGETS["RoleClass"], False
    for role in getattr(element, "role_requirements", ()):
        yield "RoleRequirements", role, _REF_TARGETS["RoleClass"], False


def _check_references(reader: _Reader, doc: Document, index: ResolverIndex):
    for element, _, path in walk(doc):
        for label, ref, kinds, allow_id in references(element):
            if resolve_reference(index, ref, kinds, allow_id=allow_id) is None:
                reader.report(WARNING, "DANGLING_REF", f"{label}={str(ref)!r} does not resolve", f"/{path}")
        if isinstance(element, InternalLink):
            for side, token in (("A", element.ref_partner_side_a), ("B", element.ref_partner_side_b)):
                if token and resolve_link_partner(index, token) is None:
                    reader.report(WARNING, "DANGLING_REF",
                                  f"RefPartnerSide{side}={token!r} does not resolve", f"/{path}")


def _read_bytes(source) -> tuple[bytes, str]:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source), ""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            return f.read(), os.path.basename(os.fspath(source))
    return source.read(), os.path.basename(getattr(source, "name", "") or "")


def _run(source, source_name=None):
    data, default_name = _read_bytes(source)
    name = source_name if source_name is not None else default_name
    reader = _Reader()
    try:
        root = ET.parse(io.BytesIO(data)).getroot()
    except ET.ParseError as exc:
        line, column = exc.position
        reader.report(ERROR, "MALFORMED_XML", str(exc), f"line {line}, column {column}")
        return None, reader.diagnostics
    doc = reader.document(root, name)
    if not any(d.severity == ERROR for d in reader.diagnostics):
        _check_references(reader, doc, index_document(doc))
    return doc, reader.diagnostics


def parse_document(source: Union[bytes, str, os.PathLike, BinaryIO], *,
                   source_name: Optional[str] = None) -> tuple[Document, list[ParseDiagnostic]]:
    """Parse AutomationML bytes (or a path / binary file) into a Document.

    Raises CaexParseError when any error-level diagnostic is produced;
    otherwise returns the document with the (warning-only) diagnostics.
    """
    doc, diagnostics = _run(source, source_name)
    if doc is None or any(d.severity == ERROR for d in diagnostics):
        raise CaexParseError(diagnostics)
    for diag in diagnostics:
        logger.debug("%s", diag)
    return doc, diagnostics


def diagnose(source) -> list[ParseDiagnostic]:
    """All diagnostics for a source, without raising on errors."""
    return _run(source)[1]


def count_elements(doc: Document) -> dict[str, int]:
    counts: dict[str, int] = {}
    for element, _, _ in walk(doc):
        kind = type(element).__name__
        counts[kind] = counts.get(kind, 0) + 1
    return counts


__all__ = [
    "CaexParseError",
    "ParseDiagnostic",
    "count_elements",
    "diagnose",
    "index_document",
    "parse_document",
    "references",
]
