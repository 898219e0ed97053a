"""Shape-style validation of mapped graphs and structural checks of documents.

Rule files are line oriented::

    prefix arapc: <http://example.org/plant/ArApcIcLib/>
    rule spi-link target arapc:SensorPortInterface connection path aml:isLinked class arapc:SensorPortInterface
    rule one-spi target-role <http://example.org/plant/ArApcRcLib/SensorPort> cardinality path aml:hasInterface class arapc:SensorPortInterface max 1

``target`` selects instances by ``rdf:type``; ``target-role`` selects
InternalElements by RoleRequirement. Both include subclasses. A path written
``^iri`` is followed backwards. ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from .parser import diagnose
from .query import transitive_closure
from .rdf import RDF, RDF_TYPE, RDFS, RDFS_SUBCLASSOF, Graph, Iri
from .vocab import DEFAULT_VOCAB, Vocabulary

CARDINALITY = "cardinality"
CONNECTION = "connection"

# Parse diagnostics that count as structural violations.
STRUCTURAL_CODES = frozenset({
    "MALFORMED_XML", "NOT_CAEX", "MISSING_NAME", "MISSING_MANDATORY_ID", "DUPLICATE_ID",
    "DUPLICATE_NAME", "INVALID_PATH", "INVALID_LINK", "DANGLING_REF",
})


class RuleSyntaxError(ValueError):
    def __init__(self, line_no: int, line: str, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}: {line.strip()!r}")


@dataclass(frozen=True)
class ShapeRule:
    rule_id: str
    target_class: Iri
    kind: str
    path: Iri
    value_class: Optional[Iri] = None
    min_count: Optional[int] = None
    max_count: Optional[int] = None
    inverse: bool = False
    target_by_role: bool = False

    def __post_init__(self):
        if self.kind not in (CARDINALITY, CONNECTION):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == CARDINALITY and self.min_count is None and self.max_count is None:
            raise ValueError("cardinality rule needs min or max")
        if self.kind == CONNECTION and self.value_class is None:
            raise ValueError("connection rule needs a class")
        for bound in (self.min_count, self.max_count):
            if bound is not None and bound < 0:
                raise ValueError("counts must be non-negative")


@dataclass(frozen=True, order=True)
class Violation:
    rule_id: str
    focus_node: str
    observed: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return not self.violations

    def merge(self, other: ValidationReport) -> ValidationReport:
        return ValidationReport(sorted(self.violations + other.violations))

    def to_dict(self) -> dict:
        return {"conforms": self.conforms, "violations": [asdict(v) for v in self.violations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        if self.conforms:
            return "conforms: true\n"
        lines = [f"conforms: false ({len(self.violations)} violations)"]
        for v in self.violations:
            lines.append(f"[{v.rule_id}] {v.focus_node}: {v.message} (observed: {v.observed})")
        return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"\^?<[^>]*>|\S+")
_PREFIX_NAME = re.compile(r"^([A-Za-z][\w-]*)?:$")


def _tokenize(line: str) -> list[str]:
    tokens = []
    for token in _TOKEN.findall(line):
        if token.startswith("#"):
            break
        tokens.append(token)
    return tokens


def _expand(token: str, prefixes: dict[str, str]) -> Iri:
    if token.startswith("<") and token.endswith(">"):
        return Iri(token[1:-1])
    prefix, sep, local = token.partition(":")
    if sep and prefix in prefixes:
        return Iri(prefixes[prefix] + local)
    return Iri(token)


def load_rules(source, vocab: Vocabulary = DEFAULT_VOCAB) -> list[ShapeRule]:
    """Read a rule file (bytes, text or a binary/text stream)."""
    if hasattr(source, "read"):
        source = source.read()
    text = source.decode("utf-8") if isinstance(source, (bytes, bytearray)) else source
    prefixes = {"aml": str(vocab.ns), "rdf": str(RDF), "rdfs": str(RDFS)}
    rules: list[ShapeRule] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        tokens = _tokenize(raw)
        if not tokens:
            continue
        if tokens[0] == "prefix":
            if (len(tokens) != 3 or not _PREFIX_NAME.match(tokens[1])
                    or not (tokens[2].startswith("<") and tokens[2].endswith(">"))):
                raise RuleSyntaxError(line_no, raw, "expected 'prefix <name>: <iri>'")
            prefixes[tokens[1][:-1]] = tokens[2][1:-1]
            continue
        try:
            rule = _parse_rule(tokens, prefixes)
        except (ValueError, IndexError) as exc:
            raise RuleSyntaxError(line_no, raw, str(exc)) from exc
        if rule.rule_id in seen_ids:
            raise RuleSyntaxError(line_no, raw, f"duplicate rule id {rule.rule_id!r}")
        seen_ids.add(rule.rule_id)
        rules.append(rule)
    return rules


def _parse_rule(tokens: list[str], prefixes: dict[str, str]) -> ShapeRule:
    if len(tokens) < 2 or tokens[0] != "rule":
        raise ValueError("expected 'rule <id> ...'")
    fields: dict = {"rule_id": tokens[1]}
    i = 2
    while i < len(tokens):
        key = tokens[i]
        if key in (CARDINALITY, CONNECTION):
            if "kind" in fields:
                raise ValueError("rule kind given twice")
            fields["kind"] = key
            i += 1
            continue
        if i + 1 >= len(tokens):
            raise ValueError(f"missing value after {key!r}")
        value = tokens[i + 1]
        if key in ("target", "target-role"):
            fields["target_class"] = _expand(value, prefixes)
            fields["target_by_role"] = key == "target-role"
        elif key == "path":
            if value.startswith("^"):
                fields["inverse"] = True
                value = value[1:]
            fields["path"] = _expand(value, prefixes)
        elif key == "class":
            fields["value_class"] = _expand(value, prefixes)
        elif key in ("min", "max"):
            if not value.isdigit():
                raise ValueError(f"{key} must be a non-negative integer")
            fields[f"{key}_count"] = int(value)
        else:
            raise ValueError(f"unknown keyword {key!r}")
        i += 2
    for required in ("target_class", "kind", "path"):
        if required not in fields:
            raise ValueError(f"missing {required.replace('_class', '')!r}")
    return ShapeRule(**fields)


def _subclasses(graph: Graph, cls: Iri) -> set[Iri]:
    return transitive_closure(graph, RDFS_SUBCLASSOF, cls, inverse=True)


def instances_of(graph: Graph, cls: Iri) -> set[Iri]:
    """Instances of ``cls`` or any of its subclasses."""
    out: set[Iri] = set()
    for sub in _subclasses(graph, cls):
        out |= graph.subjects(RDF_TYPE, sub)
    return out


def _targets(graph: Graph, rule: ShapeRule, vocab: Vocabulary) -> set[Iri]:
    if not rule.target_by_role:
        return instances_of(graph, rule.target_class)
    out: set[Iri] = set()
    for role in _subclasses(graph, rule.target_class):
        out |= graph.subjects(vocab.hasRoleRequirement, role)
    return out


def _successors(graph: Graph, node: Iri, rule: ShapeRule):
    if rule.inverse:
        return graph.subjects(rule.path, node)
    return graph.objects(node, rule.path)


def validate(graph: Graph, rules: Iterable[ShapeRule], vocab: Vocabulary = DEFAULT_VOCAB) -> ValidationReport:
    violations: list[Violation] = []
    for rule in rules:
        members = instances_of(graph, rule.value_class) if rule.value_class is not None else None
        for focus in sorted(_targets(graph, rule, vocab)):
            successors = _successors(graph, focus, rule)
            if rule.kind == CARDINALITY:
                count = len(successors if members is None else successors & members)
                what = f"instances of <{rule.value_class}>" if members is not None else "values"
                if rule.max_count is not None and count > rule.max_count:
                    violations.append(Violation(rule.rule_id, focus, str(count),
                                                f"{count} {what} via <{rule.path}>, at most {rule.max_count} allowed"))
                if rule.min_count is not None and count < rule.min_count:
                    violations.append(Violation(rule.rule_id, focus, str(count),
                                                f"{count} {what} via <{rule.path}>, at least {rule.min_count} required"))
            else:
                for obj in sorted(map(str, successors)):
                    if obj not in members:
                        violations.append(Violation(rule.rule_id, focus, obj,
                                                    f"<{obj}> is not an instance of <{rule.value_class}>"))
    return ValidationReport(sorted(violations))


def check_structural(source) -> ValidationReport:
    """Basic structural validation: parse problems reported as violations."""
    violations = [
        Violation(d.code, d.location or "/", d.code, d.message)
        for d in diagnose(source)
        if d.code in STRUCTURAL_CODES
    ]
    return ValidationReport(sorted(violations))
