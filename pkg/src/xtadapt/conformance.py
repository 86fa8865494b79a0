"""Self-contained well-formedness validation of an adapted grammar.

Checks everything that is decidable from the grammar text alone: reference
resolution, cross-reference completeness, duplicate and entry rules, and
assignment-operator consistency.  An empty finding list is a PASS.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    Assignment,
    CrossReference,
    Grammar,
    RuleCall,
    walk,
)

#: Terminals every Xtext grammar can reference without declaring them.
DEFAULT_KNOWN_TERMINALS = frozenset({"ID", "STRING", "INT", "EString"})


class FindingKind(Enum):
    UNRESOLVED_RULE_CALL = "UNRESOLVED_RULE_CALL"
    EMPTY_CROSSREF_TYPE = "EMPTY_CROSSREF_TYPE"
    DUPLICATE_RULE = "DUPLICATE_RULE"
    MISSING_ENTRY_RULE = "MISSING_ENTRY_RULE"
    INCONSISTENT_ASSIGN_OPERATOR = "INCONSISTENT_ASSIGN_OPERATOR"
    UNDEFINED_TERMINAL = "UNDEFINED_TERMINAL"


@dataclass(frozen=True)
class ConformanceFinding:
    rule_name: str
    kind: FindingKind
    detail: str

    def __str__(self) -> str:
        where = f" in rule {self.rule_name}" if self.rule_name else ""
        return f"{self.kind.value}{where}: {self.detail}"


def check_conformance(
    grammar: Grammar, known_terminals: frozenset[str] | set[str] | None = None
) -> list[ConformanceFinding]:
    """Validate a grammar; returns findings in rule order then node pre-order.

    ``known_terminals`` extends the built-in default set (ID, STRING, INT,
    EString) with externally defined terminal names.
    """
    known = set(DEFAULT_KNOWN_TERMINALS)
    if known_terminals:
        known.update(known_terminals)
    resolvable = (
        {r.name for r in grammar.rules}
        | {t.name for t in grammar.declared_terminals}
        | known
    )

    findings: list[ConformanceFinding] = []
    if not grammar.rules:
        findings.append(
            ConformanceFinding("", FindingKind.MISSING_ENTRY_RULE, "grammar has no rules")
        )
        return findings

    seen: set[str] = set()
    for rule in grammar.rules:
        if rule.name in seen:
            findings.append(
                ConformanceFinding(
                    rule.name,
                    FindingKind.DUPLICATE_RULE,
                    f"rule name {rule.name!r} is declared more than once",
                )
            )
        seen.add(rule.name)

        operators: dict[str, str] = {}
        for _, node in walk(rule.body):
            if isinstance(node, RuleCall):
                if node.rule_name not in resolvable:
                    findings.append(
                        ConformanceFinding(
                            rule.name,
                            FindingKind.UNRESOLVED_RULE_CALL,
                            f"call to undefined rule or terminal {node.rule_name!r}",
                        )
                    )
            elif isinstance(node, CrossReference):
                if not node.type_name:
                    findings.append(
                        ConformanceFinding(
                            rule.name,
                            FindingKind.EMPTY_CROSSREF_TYPE,
                            "cross-reference has no type: "
                            f"[|{node.terminal_name or ''}]",
                        )
                    )
                if node.terminal_name is not None and node.terminal_name not in resolvable:
                    findings.append(
                        ConformanceFinding(
                            rule.name,
                            FindingKind.UNDEFINED_TERMINAL,
                            f"cross-reference terminal {node.terminal_name!r} is undefined",
                        )
                    )
            elif isinstance(node, Assignment):
                prior = operators.get(node.feature)
                if prior is not None and {prior, node.operator} == {"=", "+="}:
                    findings.append(
                        ConformanceFinding(
                            rule.name,
                            FindingKind.INCONSISTENT_ASSIGN_OPERATOR,
                            f"feature {node.feature!r} assigned with both "
                            f"{prior!r} and {node.operator!r}",
                        )
                    )
                operators.setdefault(node.feature, node.operator)
    return findings


def load_terminals_file(text: str) -> frozenset[str]:
    """Parse a terminals override file: one identifier per line, # comments."""
    names = set()
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            names.add(line)
    return frozenset(names)
