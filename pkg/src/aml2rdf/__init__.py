"""AutomationML (CAEX 3.0) to RDF: mapping, graph queries and shape validation."""

from .caex import Document, RefPath, caex_path, resolve_id, resolve_path
from .enrich import enrich, map_full
from .mapping import MappingConfig, MappingError, assign_iri, map_document, map_structure
from .parser import CaexParseError, ParseDiagnostic, diagnose, index_document, parse_document
from .query import Degree, FlowGraph, FlowMode, RoleSelectionSpec, export_flow_graph, flow_graph, select_by_role
from .rdf import Graph, Iri, Literal, serialize_ntriples, serialize_turtle
from .validation import ShapeRule, ValidationReport, Violation, check_structural, load_rules, validate
from .vocab import DEFAULT_ONTOLOGY_NS, Vocabulary

__version__ = "0.1.0"

__all__ = [
    "CaexParseError", "DEFAULT_ONTOLOGY_NS", "Degree", "Document", "FlowGraph", "FlowMode", "Graph", "Iri",
    "Literal", "MappingConfig", "MappingError", "ParseDiagnostic", "RefPath", "RoleSelectionSpec", "ShapeRule",
    "ValidationReport", "Violation", "Vocabulary", "assign_iri", "caex_path", "check_structural", "diagnose",
    "enrich", "export_flow_graph", "flow_graph", "index_document", "load_rules", "map_document", "map_full",
    "map_structure", "parse_document", "resolve_id", "resolve_path", "select_by_role", "serialize_ntriples",
    "serialize_turtle", "validate",
]
