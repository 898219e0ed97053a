"""In-memory model of a CAEX 3.0 document and its reference algebra.

Every element class is a frozen dataclass compared by identity, so elements
can be used as dictionary keys without two structurally equal attributes
(say, two ``Length`` attributes on different tanks) being confused.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NewType, Optional, Union

ElementId = NewType("ElementId", str)


class StructuralError(ValueError):
    """Raised when an element is not part of the document it is looked up in."""


@dataclass(frozen=True)
class RefPath:
    """Slash separated reference path such as ``MyAtLib/Dimensions/Length``.

    Segments that themselves contain a slash are written in square brackets,
    which is how CAEX 3.0 escapes separators inside names.
    """

    segments: tuple[str, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("reference path needs at least one segment")
        if any(not s for s in self.segments):
            raise ValueError(f"empty segment in reference path {self.segments!r}")

    @classmethod
    def parse(cls, text: str) -> RefPath:
        segments: list[str] = []
        current: list[str] = []
        depth = 0
        for ch in text:
            if ch == "[" and depth == 0 and not current:
                depth = 1
            elif ch == "]" and depth == 1:
                depth = 0
            elif ch == "/" and depth == 0:
                segments.append("".join(current))
                current = []
            else:
                current.append(ch)
        segments.append("".join(current))
        return cls(tuple(segments))

    def child(self, name: str) -> RefPath:
        return RefPath(self.segments + (name,))

    @property
    def name(self) -> str:
        return self.segments[-1]

    def __str__(self) -> str:
        return "/".join(f"[{s}]" if "/" in s else s for s in self.segments)


@dataclass(frozen=True, eq=False)
class Attribute:
    name: str
    ref_attribute_type: Optional[RefPath] = None
    value: Optional[str] = None
    default_value: Optional[str] = None
    data_type: Optional[str] = None
    unit: Optional[str] = None
    description: Optional[str] = None
    children: tuple[Attribute, ...] = ()


@dataclass(frozen=True, eq=False)
class ExternalInterface:
    id: ElementId
    name: str
    ref_base_class: Optional[RefPath] = None
    children: tuple[ExternalInterface, ...] = ()
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True, eq=False)
class InternalLink:
    name: str
    ref_partner_side_a: str
    ref_partner_side_b: str


@dataclass(frozen=True)
class NameMapping:
    """Explicit correspondence declared in a MappingObject.

    ``kind`` is ``"attribute"`` or ``"interface"``; ``role`` is the RoleClass
    path of the requirement the mapping belongs to.
    """

    kind: str
    role: RefPath
    element_name: str
    role_name: str


@dataclass(frozen=True, eq=False)
class InternalElement:
    id: ElementId
    name: str
    ref_base_system_unit_path: Optional[RefPath] = None
    children: tuple[InternalElement, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    external_interfaces: tuple[ExternalInterface, ...] = ()
    internal_links: tuple[InternalLink, ...] = ()
    supported_role_classes: tuple[RefPath, ...] = ()
    role_requirements: tuple[RefPath, ...] = ()
    name_mappings: tuple[NameMapping, ...] = ()


@dataclass(frozen=True, eq=False)
class SystemUnitClass:
    name: str
    ref_base_class: Optional[RefPath] = None
    children: tuple[SystemUnitClass, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    external_interfaces: tuple[ExternalInterface, ...] = ()
    internal_elements: tuple[InternalElement, ...] = ()
    supported_role_classes: tuple[RefPath, ...] = ()
    internal_links: tuple[InternalLink, ...] = ()


@dataclass(frozen=True, eq=False)
class RoleClass:
    name: str
    ref_base_class: Optional[RefPath] = None
    children: tuple[RoleClass, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    external_interfaces: tuple[ExternalInterface, ...] = ()


@dataclass(frozen=True, eq=False)
class InterfaceClass:
    name: str
    ref_base_class: Optional[RefPath] = None
    children: tuple[InterfaceClass, ...] = ()
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True, eq=False)
class AttributeType:
    name: str
    ref_base_class: Optional[RefPath] = None  # RefAttributeType in the XML
    children: tuple[AttributeType, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    value: Optional[str] = None
    default_value: Optional[str] = None
    data_type: Optional[str] = None
    unit: Optional[str] = None
    description: Optional[str] = None


@dataclass(frozen=True, eq=False)
class InstanceHierarchy:
    name: str
    internal_elements: tuple[InternalElement, ...] = ()


@dataclass(frozen=True, eq=False)
class SystemUnitClassLib:
    name: str
    classes: tuple[SystemUnitClass, ...] = ()


@dataclass(frozen=True, eq=False)
class RoleClassLib:
    name: str
    classes: tuple[RoleClass, ...] = ()


@dataclass(frozen=True, eq=False)
class InterfaceClassLib:
    name: str
    classes: tuple[InterfaceClass, ...] = ()


@dataclass(frozen=True, eq=False)
class AttributeTypeLib:
    name: str
    classes: tuple[AttributeType, ...] = ()


ClassElement = Union[SystemUnitClass, RoleClass, InterfaceClass, AttributeType]
Library = Union[SystemUnitClassLib, RoleClassLib, InterfaceClassLib, AttributeTypeLib]
Element = Union[
    InstanceHierarchy,
    SystemUnitClassLib,
    RoleClassLib,
    InterfaceClassLib,
    AttributeTypeLib,
    InternalElement,
    SystemUnitClass,
    RoleClass,
    InterfaceClass,
    AttributeType,
    Attribute,
    ExternalInterface,
    InternalLink,
]

CLASS_KINDS = (SystemUnitClass, RoleClass, InterfaceClass, AttributeType)
ID_KINDS = (InternalElement, ExternalInterface)


@dataclass(frozen=True, eq=False)
class Document:
    instance_hierarchies: tuple[InstanceHierarchy, ...] = ()
    suc_libs: tuple[SystemUnitClassLib, ...] = ()
    rc_libs: tuple[RoleClassLib, ...] = ()
    ic_libs: tuple[InterfaceClassLib, ...] = ()
    at_libs: tuple[AttributeTypeLib, ...] = ()
    source_name: str = ""
    schema_version: Optional[str] = None

    @property
    def roots(self) -> tuple[Element, ...]:
        return (
            *self.instance_hierarchies,
            *self.suc_libs,
            *self.rc_libs,
            *self.ic_libs,
            *self.at_libs,
        )


def children_of(element: Element) -> tuple[Element, ...]:
    """Direct tree children in document order, whatever their kind."""
    if isinstance(element, InstanceHierarchy):
        return element.internal_elements
    if isinstance(element, (SystemUnitClassLib, RoleClassLib, InterfaceClassLib, AttributeTypeLib)):
        return element.classes
    if isinstance(element, InternalElement):
        return (
            *element.children,
            *element.attributes,
            *element.external_interfaces,
            *element.internal_links,
        )
    if isinstance(element, SystemUnitClass):
        return (
            *element.children,
            *element.attributes,
            *element.external_interfaces,
            *element.internal_elements,
            *element.internal_links,
        )
    if isinstance(element, RoleClass):
        return (*element.children, *element.attributes, *element.external_interfaces)
    if isinstance(element, (InterfaceClass, AttributeType)):
        return (*element.children, *element.attributes)
    if isinstance(element, ExternalInterface):
        return (*element.children, *element.attributes)
    if isinstance(element, Attribute):
        return element.children
    return ()


def walk(document: Document) -> Iterator[tuple[Element, Optional[Element], RefPath]]:
    """Yield ``(element, parent, path)`` for every element, depth first."""
    stack: list[tuple[Element, Optional[Element], RefPath]] = [
        (root, None, RefPath((root.name,))) for root in reversed(document.roots)
    ]
    while stack:
        element, parent, path = stack.pop()
        yield element, parent, path
        for child in reversed(children_of(element)):
            stack.append((child, element, path.child(child.name)))


def caex_path(element: Element, document: Document) -> RefPath:
    for candidate, _, path in walk(document):
        if candidate is element:
            return path
    raise StructuralError(f"{type(element).__name__} {element.name!r} is not part of the document")


@dataclass
class ResolverIndex:
    """Lookup tables from IDs and path text to elements, plus the inverse maps."""

    by_id: dict[str, Element] = field(default_factory=dict)
    by_path: dict[str, Element] = field(default_factory=dict)
    path_of: dict[Element, RefPath] = field(default_factory=dict)
    parent_of: dict[Element, Optional[Element]] = field(default_factory=dict)


def resolve_path(index: ResolverIndex, path: Union[RefPath, str]) -> Optional[Element]:
    if isinstance(path, str):
        if not path:
            raise ValueError("cannot resolve an empty reference path")
        path = RefPath.parse(path)
    return index.by_path.get(str(path))


def resolve_id(index: ResolverIndex, element_id: str) -> Optional[Element]:
    return index.by_id.get(element_id)


def resolve_reference(index: ResolverIndex, ref: Union[RefPath, str], kinds: tuple[type, ...],
                      *, allow_id: bool = False) -> Optional[Element]:
    """Resolve a path (then optionally an ID) to an element of one of ``kinds``.

    A hit of the wrong kind counts as unresolved.
    """
    text = str(ref)
    try:
        target = resolve_path(index, ref)
    except ValueError:
        target = None
    if target is None and allow_id:
        target = resolve_id(index, text)
    if target is not None and isinstance(target, kinds):
        return target
    return None


def resolve_link_partner(index: ResolverIndex, token: str) -> Optional[ExternalInterface]:
    """Find the ExternalInterface an InternalLink side names.

    CAEX 3.0 uses the interface ID; paths and the older ``ownerID:name`` form
    are accepted as fallbacks.
    """
    if not token:
        return None
    target = resolve_id(index, token)
    if isinstance(target, ExternalInterface):
        return target
    target = resolve_reference(index, token, (ExternalInterface,))
    if target is not None:
        return target
    owner_id, sep, name = token.rpartition(":")
    if sep:
        owner = resolve_id(index, owner_id)
        if owner is not None:
            for iface in getattr(owner, "external_interfaces", ()):
                if iface.name == name:
                    return iface
    return None
