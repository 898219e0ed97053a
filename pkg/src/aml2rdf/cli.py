"""Command line front end: ``aml2rdf map | query | validate``.

Exit codes: 0 success, 1 fatal parse or mapping error (or warnings under
``--strict``), 2 unreadable input or bad rules file, 3 validation violations.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .enrich import map_full
from .mapping import MappingConfig, MappingError
from .parser import CaexParseError, ParseDiagnostic, parse_document
from .query import (
    Degree,
    FlowMode,
    RoleSelectionSpec,
    default_port_class,
    export_flow_graph,
    flow_graph,
    select_by_role,
)
from .rdf import Iri, iri_safe, serialize_ntriples, serialize_turtle
from .validation import RuleSyntaxError, ValidationReport, check_structural, load_rules, validate
from .vocab import DEFAULT_ONTOLOGY_NS

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_INPUT = 2
EXIT_VIOLATIONS = 3

BASE_IRI_ENV = "AML2RDF_BASE_IRI"

class _InputError(Exception):
    pass


def default_base_iri(input_path: str) -> str:
    """``urn:aml:<document name>/`` unless overridden via the environment."""
    env = os.environ.get(BASE_IRI_ENV)
    if env:
        return env
    stem = Path(input_path).stem or "document"
    return f"urn:aml:{iri_safe(stem)}/"


def _report(diag: ParseDiagnostic) -> None:
    where = f" at {diag.location}" if diag.location else ""
    print(f"{diag.severity}: {diag.code}{where}: {diag.message}", file=sys.stderr)


def _read_input(path: str) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(args, data: bytes) -> None:
    if args.output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(args.output, "wb") as f:
            f.write(data)


def _config(args) -> MappingConfig:
    return MappingConfig(
        base_iri=args.base_iri or default_base_iri(args.input),
        ontology_ns=args.ontology_ns,
        emit_labels=not getattr(args, "no_labels", False),
    )


def _load_graph(args):
    """Parse and map the input; returns (graph, config) or an exit code."""
    data = _read_input(args.input)
    try:
        config = _config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        doc, parse_diags = parse_document(data, source_name=Path(args.input).name)
        graph, map_diags = map_full(doc, config)
    except CaexParseError as exc:
        for diag in exc.diagnostics:
            _report(diag)
        return EXIT_FATAL
    except MappingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    seen = set()
    for diag in parse_diags + map_diags:
        key = (diag.code, diag.location)
        if diag.code == "DANGLING_REF" and key in seen:
            continue
        seen.add(key)
        _report(diag)
    if args.strict and (parse_diags or map_diags):
        print("error: warnings are fatal under --strict", file=sys.stderr)
        return EXIT_FATAL
    return graph, config


def cmd_map(args) -> int:
    loaded = _load_graph(args)
    if isinstance(loaded, int):
        return loaded
    graph, _ = loaded
    _write(args, serialize_turtle(graph) if args.format == "turtle" else serialize_ntriples(graph))
    return EXIT_OK


def _expand_iri(token: str, base: str) -> Iri:
    token = token.strip()
    if token.startswith("<") and token.endswith(">"):
        token = token[1:-1]
    if ":" not in token.split("/", 1)[0]:
        token = base + token
    return Iri(token)


def cmd_query(args) -> int:
    loaded = _load_graph(args)
    if isinstance(loaded, int):
        return loaded
    graph, config = loaded
    vocab = config.vocab
    if args.query == "select":
        spec = RoleSelectionSpec(_expand_iri(args.role, config.base_iri), Degree(args.degree))
        lines = "".join(f"{iri}\n" for iri in select_by_role(graph, spec, vocab))
        _write(args, lines.encode("utf-8"))
    else:
        port = _expand_iri(args.port_class, config.base_iri) if args.port_class else default_port_class(config)
        valve_type = _expand_iri(args.valve_state_type, config.base_iri) if args.valve_state_type else None
        flow = flow_graph(graph, port, FlowMode(args.mode), vocab, valve_type)
        _write(args, serialize_ntriples(export_flow_graph(flow, vocab)))
    return EXIT_OK


def cmd_validate(args) -> int:
    if not args.rules and not args.structural:
        print("error: give --rules FILE and/or --structural", file=sys.stderr)
        return EXIT_INPUT
    data = _read_input(args.input)
    report = ValidationReport()
    if args.structural:
        report = report.merge(check_structural(data))
    if args.rules:
        try:
            rules = load_rules(_read_input(args.rules), MappingConfig(ontology_ns=args.ontology_ns).vocab)
        except (RuleSyntaxError, UnicodeDecodeError, ValueError) as exc:
            print(f"error: {args.rules}: {exc}", file=sys.stderr)
            return EXIT_INPUT
        structurally_broken = args.structural and any(v.rule_id in ("MALFORMED_XML", "NOT_CAEX")
                                                      for v in report.violations)
        if not structurally_broken:
            loaded = _load_graph(args)
            if isinstance(loaded, int):
                if not args.structural:
                    return loaded
            else:
                graph, config = loaded
                report = report.merge(validate(graph, rules, config.vocab))
    body = report.to_json() if args.json else report.to_text()
    _write(args, body.encode("utf-8"))
    return EXIT_OK if report.conforms else EXIT_VIOLATIONS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="AutomationML (.aml) file")
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--base-iri", help=f"namespace for element IRIs (env: {BASE_IRI_ENV})")
    common.add_argument("--ontology-ns", default=DEFAULT_ONTOLOGY_NS, help="ontology namespace")
    common.add_argument("--strict", action="store_true", help="treat warnings as fatal")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="aml2rdf", description="Map AutomationML files to RDF, query and validate them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", parents=[common], help="map a document to RDF")
    p_map.add_argument("--format", choices=("ntriples", "turtle"), default="ntriples")
    p_map.add_argument("--no-labels", action="store_true", help="omit rdfs:label triples")
    p_map.set_defaults(func=cmd_map)

    p_query = sub.add_parser("query", help="run a graph query")
    queries = p_query.add_subparsers(dest="query", required=True)
    p_select = queries.add_parser("select", parents=[common], help="select InternalElements by required role")
    p_select.add_argument("--role", required=True, help="role class IRI (relative IRIs use the base IRI)")
    p_select.add_argument("--degree", choices=[d.value for d in Degree], default=Degree.EXACT.value)
    p_select.set_defaults(func=cmd_query)
    p_flow = queries.add_parser("flow", parents=[common], help="material flow graph as N-Triples")
    p_flow.add_argument("--mode", choices=[m.value for m in FlowMode], default=FlowMode.BIDIRECTIONAL.value)
    p_flow.add_argument("--port-class", help="port InterfaceClass IRI (default: the AutomationML base Port)")
    p_flow.add_argument("--valve-state-type", help="AttributeType IRI marking valve states")
    p_flow.set_defaults(func=cmd_query)

    p_val = sub.add_parser("validate", parents=[common], help="validate against shape rules")
    p_val.add_argument("--rules", help="rule file")
    p_val.add_argument("--structural", action="store_true", help="report structural problems too")
    p_val.add_argument("--json", action="store_true", help="machine-readable report")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
