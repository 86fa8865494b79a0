"""Scoped rewriting operations on grammars and ordered configs of them.

A TransformationConfig is an ordered list of scoped operations.  Application
first buckets entries into a fixed phase order (structural moves before
textual edits) and then applies them in listed order within each phase, which
makes the result independent of how entries were discovered or listed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

from .model import (
    Alternatives,
    Assignment,
    Cardinality,
    Expression,
    Grammar,
    Group,
    Keyword,
    ParserRule,
    Path,
    RuleCall,
    assignments_of,
    children_of,
    find_rule,
    grammar_problems,
    node_at,
    walk,
    with_children,
)
from .parsing import parse_rule_body


class TransformError(Exception):
    """Invalid config content or an engine-level invariant violation."""


class ScopeKind(Enum):
    GRAMMAR = "GRAMMAR"
    RULE = "RULE"
    ATTRIBUTE = "ATTRIBUTE"


class OpKind(Enum):
    REMOVE_KEYWORD = "REMOVE_KEYWORD"
    REMOVE_BRACES = "REMOVE_BRACES"
    REMOVE_OPTIONALITY = "REMOVE_OPTIONALITY"
    ADD_OPTIONALITY = "ADD_OPTIONALITY"
    CHANGE_SEPARATOR = "CHANGE_SEPARATOR"
    ADD_TERMINATOR = "ADD_TERMINATOR"
    RENAME_KEYWORD = "RENAME_KEYWORD"
    CHANGE_CALLED_RULE = "CHANGE_CALLED_RULE"
    PROMOTE_ATTRIBUTE = "PROMOTE_ATTRIBUTE"
    MAKE_BRACES_OPTIONAL = "MAKE_BRACES_OPTIONAL"
    REPLACE_RULE = "REPLACE_RULE"


#: Canonical application order: wholesale replacement, then structural moves,
#: then optionality, brace removal, keyword edits, separators/terminators and
#: finally called-rule rewrites.  Entries keep their listed order per phase.
PHASE_OF: dict[OpKind, int] = {
    OpKind.REPLACE_RULE: 1,
    OpKind.PROMOTE_ATTRIBUTE: 2,
    OpKind.MAKE_BRACES_OPTIONAL: 3,
    OpKind.ADD_OPTIONALITY: 3,
    OpKind.REMOVE_OPTIONALITY: 3,
    OpKind.REMOVE_BRACES: 4,
    OpKind.REMOVE_KEYWORD: 5,
    OpKind.RENAME_KEYWORD: 5,
    OpKind.CHANGE_SEPARATOR: 6,
    OpKind.ADD_TERMINATOR: 6,
    OpKind.CHANGE_CALLED_RULE: 7,
}

#: REMOVE_KEYWORD text value meaning "any keyword matching the enclosing
#: assignment's feature name or the rule name".
ANY_KEYWORD = "*"


@dataclass(frozen=True)
class Scope:
    kind: ScopeKind
    rule: str | None = None
    feature: str | None = None

    def __str__(self) -> str:
        if self.kind is ScopeKind.GRAMMAR:
            return "grammar"
        if self.kind is ScopeKind.RULE:
            return f"rule {self.rule}"
        return f"attribute {self.rule}.{self.feature}"


def grammar_scope() -> Scope:
    return Scope(ScopeKind.GRAMMAR)


def rule_scope(rule: str) -> Scope:
    return Scope(ScopeKind.RULE, rule=rule)


def attribute_scope(rule: str, feature: str) -> Scope:
    return Scope(ScopeKind.ATTRIBUTE, rule=rule, feature=feature)


@dataclass(frozen=True)
class TransformOp:
    kind: OpKind
    scope: Scope
    params: Mapping[str, object] = field(default_factory=dict)

    def param(self, name: str, default: object = None) -> object:
        return self.params.get(name, default)

    def describe(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"{self.kind.value}({params}) @ {self.scope}"


@dataclass(frozen=True)
class TransformationConfig:
    entries: tuple[TransformOp, ...] = ()
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def is_identity(self) -> bool:
        return not self.entries


@dataclass
class OpOutcome:
    op: TransformOp
    matched: int
    rules_affected: tuple[str, ...]

    @property
    def no_match(self) -> bool:
        return self.matched == 0


@dataclass
class ApplyReport:
    outcomes: list[OpOutcome] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        return [
            f"NO_MATCH: {o.op.describe()} matched nothing"
            for o in self.outcomes
            if o.no_match
        ]


# ---------------------------------------------------------------------------
# Scope resolution
# ---------------------------------------------------------------------------


def _scoped_rules(grammar: Grammar, scope: Scope) -> list[ParserRule]:
    if scope.kind is ScopeKind.GRAMMAR:
        return list(grammar.rules)
    rule = find_rule(grammar, scope.rule or "")
    return [rule] if rule is not None else []


def attribute_anchors(rule: ParserRule, feature: str) -> list[Path]:
    """Region anchors for a feature: for each assignment, the highest
    enclosing Group all of whose assignments target the same feature (the
    repetition/optionality wrapper), else the assignment node itself.

    The body root only qualifies when it carries no foreign keyword, so a
    single-attribute rule like ``'Label' '{' ('value' value=X) '}'`` anchors
    at the wrapper group, not at the whole body.
    """
    anchors: list[Path] = []
    for path, assignment in assignments_of(rule):
        if assignment.feature != feature:
            continue
        anchor = path
        while anchor:
            parent_path = anchor[:-1]
            parent = node_at(rule.body, parent_path)
            if not isinstance(parent, Group):
                break
            features = {
                n.feature for _, n in walk(parent) if isinstance(n, Assignment)
            }
            if features != {feature}:
                break
            if parent_path == () and any(
                isinstance(c, Keyword) and c.text != feature and _is_word(c.text)
                for c in parent.children
            ):
                break
            # Brace keywords belong to the region only in the generated
            # keyword-braces-content idiom, where the assignment sits right
            # next to them; a braces wrapper around a finished sub-group is
            # rule structure, not part of the attribute.
            has_brace_child = any(
                isinstance(c, Keyword) and c.text in ("{", "}")
                for c in parent.children
            )
            assignment_is_direct = any(
                isinstance(c, Assignment) and c.feature == feature
                for c in parent.children
            )
            if has_brace_child and not assignment_is_direct:
                break
            anchor = parent_path
        if anchor not in anchors:
            anchors.append(anchor)
    return anchors


def _is_word(text: str) -> bool:
    return bool(text) and (text[0].isalpha() or text[0] == "_")


def _scope_anchor_paths(rule: ParserRule, scope: Scope) -> list[Path]:
    if scope.kind is ScopeKind.ATTRIBUTE:
        return attribute_anchors(rule, scope.feature or "")
    return [()]


def _path_within(path: Path, anchors: Iterable[Path]) -> bool:
    return any(path[: len(a)] == a for a in anchors)


# ---------------------------------------------------------------------------
# Tree editing helpers
# ---------------------------------------------------------------------------


def _collapse(expr: Expression, shrunk: bool) -> Expression | None:
    """Drop emptied nodes and unwrap plain singletons after removals.

    A single-branch Alternatives that keeps a cardinality turns into a Group
    so that its printed form re-parses to the same structure.
    """
    if not shrunk or not isinstance(expr, (Group, Alternatives)):
        return expr
    kids = children_of(expr)
    if not kids:
        return None
    if len(kids) == 1:
        if expr.cardinality is Cardinality.ONE and not expr.predicated:
            return kids[0]
        if isinstance(expr, Alternatives):
            return Group(
                children=kids,
                cardinality=expr.cardinality,
                predicated=expr.predicated,
            )
    return expr


def _edit_children(
    expr: Expression,
    path: Path,
    editor,
) -> tuple[Expression | None, int]:
    """Apply ``editor(node, path) -> (new_children | None, matched)`` to every
    Group/Alternatives node bottom-up; None keeps the original children."""
    matched = 0
    kids = children_of(expr)
    if kids:
        new_kids: list[Expression] = []
        for i, child in enumerate(kids):
            new_child, m = _edit_children(child, path + (i,), editor)
            matched += m
            if new_child is not None:
                new_kids.append(new_child)
        expr = with_children(expr, tuple(new_kids))
        if isinstance(expr, (Group, Alternatives)):
            edited, m = editor(expr, path)
            matched += m
            if edited is not None:
                shrunk = len(edited) < len(children_of(expr))
                expr = with_children(expr, tuple(edited))
                collapsed = _collapse(expr, shrunk)
                return collapsed, matched
            if not children_of(expr):
                return None, matched
    return expr, matched


def _rewrite_nodes(expr: Expression, path: Path, fn) -> tuple[Expression, int]:
    """Apply ``fn(node, path) -> node | None`` pre-order; None keeps node."""
    matched = 0
    new = fn(expr, path)
    if new is not None:
        expr = new
        matched += 1
    kids = children_of(expr)
    if kids:
        new_kids = []
        for i, child in enumerate(kids):
            nc, m = _rewrite_nodes(child, path + (i,), fn)
            new_kids.append(nc)
            matched += m
        expr = with_children(expr, tuple(new_kids))
    return expr, matched


def _matching_brace_span(children: tuple[Expression, ...]) -> tuple[int, int] | None:
    """Indices of the first balanced '{' ... '}' keyword pair, or None."""
    depth = 0
    open_idx = -1
    for i, child in enumerate(children):
        if isinstance(child, Keyword) and child.text == "{":
            if depth == 0:
                open_idx = i
            depth += 1
        elif isinstance(child, Keyword) and child.text == "}":
            depth -= 1
            if depth == 0 and open_idx >= 0:
                return open_idx, i
    return None


def _set_rule(grammar: Grammar, rule: ParserRule) -> Grammar:
    rules = tuple(rule if r.name == rule.name else r for r in grammar.rules)
    return replace(grammar, rules=rules)


# ---------------------------------------------------------------------------
# Operation semantics
# ---------------------------------------------------------------------------


def _keyword_feature_context(rule: ParserRule) -> dict[Path, str]:
    """Map each Keyword path to the feature owning it: the feature of its
    minimal single-feature group region, or of the assignment immediately
    following it (the generated keyword-per-attribute idiom)."""
    context: dict[Path, str] = {}
    for path, node in walk(rule.body):
        if not isinstance(node, (Group, Alternatives)):
            continue
        kids = children_of(node)
        for i, child in enumerate(kids[:-1]):
            if isinstance(child, Keyword) and isinstance(kids[i + 1], Assignment):
                context.setdefault(path + (i,), kids[i + 1].feature)
        features = {n.feature for _, n in walk(node) if isinstance(n, Assignment)}
        if len(features) != 1:
            continue
        feature = next(iter(features))
        for sub_path, sub in walk(node, path):
            if isinstance(sub, Keyword):
                context.setdefault(sub_path, feature)
    return context


def _apply_remove_keyword(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    text = op.param("text")
    anchors = _scope_anchor_paths(rule, op.scope)
    if not anchors:
        return rule, 0
    kw_features = _keyword_feature_context(rule) if text == ANY_KEYWORD else {}
    feature = op.scope.feature

    def removable(kw: Keyword, path: Path) -> bool:
        if not _path_within(path, anchors):
            # A bare-assignment anchor also covers the keyword sibling
            # immediately before it (generated keyword-per-attribute idiom).
            if not any(
                len(a) == len(path) and a[:-1] == path[:-1] and a[-1] == path[-1] + 1
                for a in anchors
            ):
                return False
        if text == ANY_KEYWORD:
            owner = kw_features.get(path)
            if op.scope.kind is ScopeKind.ATTRIBUTE:
                return kw.text == feature
            return kw.text == rule.name or (owner is not None and kw.text == owner)
        return kw.text == text

    def editor(node: Expression, path: Path):
        kids = children_of(node)
        kept = [
            c
            for i, c in enumerate(kids)
            if not (isinstance(c, Keyword) and removable(c, path + (i,)))
        ]
        if len(kept) == len(kids):
            return None, 0
        return kept, len(kids) - len(kept)

    body, matched = _edit_children(rule.body, (), editor)
    if body is None or matched == 0:
        return rule, 0
    return replace(rule, body=body), matched


def _apply_rename_keyword(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    old, new = str(op.param("from")), str(op.param("to"))
    anchors = _scope_anchor_paths(rule, op.scope)
    if not anchors:
        return rule, 0

    def fn(node: Expression, path: Path):
        if (
            isinstance(node, Keyword)
            and node.text == old
            and (_path_within(path, anchors) or _sibling_of_anchor(path, anchors))
        ):
            return replace(node, text=new)
        return None

    body, matched = _rewrite_nodes(rule.body, (), fn)
    return (replace(rule, body=body), matched) if matched else (rule, 0)


def _sibling_of_anchor(path: Path, anchors: Iterable[Path]) -> bool:
    return any(
        len(a) == len(path) and a[:-1] == path[:-1] and a[-1] == path[-1] + 1
        for a in anchors
    )


def _apply_remove_braces(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    anchors = _scope_anchor_paths(rule, op.scope)
    if not anchors:
        return rule, 0

    def editor(node: Expression, path: Path):
        if not isinstance(node, Group):
            return None, 0
        kids = children_of(node)
        if not _path_within(path, anchors):
            return None, 0
        span = _matching_brace_span(kids)
        if span is None:
            return None, 0
        lo, hi = span
        kept = [c for i, c in enumerate(kids) if i not in (lo, hi)]
        return kept, 1

    body, matched = _edit_children(rule.body, (), editor)
    if body is None or matched == 0:
        return rule, 0
    return replace(rule, body=body), matched


def _apply_set_optionality(
    rule: ParserRule, op: TransformOp, target: Cardinality, source: Cardinality
) -> tuple[ParserRule, int]:
    anchors = _scope_anchor_paths(rule, op.scope)
    matched = 0
    body = rule.body
    for anchor in anchors:
        node = node_at(body, anchor)
        if node.cardinality is source:
            body = _replace_at(body, anchor, replace(node, cardinality=target))
            matched += 1
    return (replace(rule, body=body), matched) if matched else (rule, 0)


def _replace_at(root: Expression, path: Path, new_node: Expression) -> Expression:
    if not path:
        return new_node
    kids = list(children_of(root))
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], new_node)
    return with_children(root, tuple(kids))


def _apply_change_separator(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    old = str(op.param("from"))
    new = op.param("to")  # None means: drop the separator
    anchors = _scope_anchor_paths(rule, op.scope)
    if not anchors:
        return rule, 0

    def fn(node: Expression, path: Path):
        if (
            isinstance(node, Group)
            and node.cardinality in (Cardinality.STAR, Cardinality.PLUS)
            and node.children
            and isinstance(node.children[0], Keyword)
            and node.children[0].text == old
            and _path_within(path, anchors)
        ):
            sep = node.children[0]
            if new is None:
                return replace(node, children=node.children[1:])
            return replace(
                node, children=(replace(sep, text=str(new)),) + node.children[1:]
            )
        return None

    body, matched = _rewrite_nodes(rule.body, (), fn)
    return (replace(rule, body=body), matched) if matched else (rule, 0)


def _apply_add_terminator(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    text = str(op.param("text"))
    if op.scope.kind is not ScopeKind.ATTRIBUTE:
        return rule, 0
    feature = op.scope.feature or ""
    anchors = attribute_anchors(rule, feature)
    matched = 0
    body = rule.body
    for anchor in anchors:
        node = node_at(body, anchor)
        if isinstance(node, Group):
            idx = None
            for i, child in enumerate(node.children):
                if isinstance(child, Assignment) and child.feature == feature:
                    idx = i
            if idx is None:
                continue
            kids = node.children[: idx + 1] + (Keyword(text=text),) + node.children[idx + 1 :]
            body = _replace_at(body, anchor, replace(node, children=kids))
            matched += 1
        elif isinstance(node, Assignment):
            if not anchor:
                continue
            parent_path = anchor[:-1]
            parent = node_at(body, parent_path)
            kids = list(children_of(parent))
            pos = anchor[-1] + 1
            kids.insert(pos, Keyword(text=text))
            body = _replace_at(body, parent_path, with_children(parent, tuple(kids)))
            matched += 1
    return (replace(rule, body=body), matched) if matched else (rule, 0)


def _apply_change_called_rule(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    old, new = str(op.param("from")), str(op.param("to"))
    anchors = _scope_anchor_paths(rule, op.scope)
    if not anchors:
        return rule, 0

    def fn(node: Expression, path: Path):
        if (
            isinstance(node, Assignment)
            and isinstance(node.terminal, RuleCall)
            and node.terminal.rule_name == old
            and _path_within(path, anchors)
        ):
            return replace(node, terminal=replace(node.terminal, rule_name=new))
        return None

    body, matched = _rewrite_nodes(rule.body, (), fn)
    return (replace(rule, body=body), matched) if matched else (rule, 0)


def _apply_promote_attribute(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    if op.scope.kind is not ScopeKind.ATTRIBUTE:
        return rule, 0
    feature = op.scope.feature or ""
    body = rule.body
    if not isinstance(body, Group):
        return rule, 0
    paths = [p for p, a in assignments_of(rule) if a.feature == feature]
    if not paths:
        return rule, 0
    first = paths[0]
    assignment = node_at(body, first)
    assert isinstance(assignment, Assignment)

    # Remove the assignment and a keyword sibling immediately before it.
    parent_path = first[:-1]
    parent = node_at(body, parent_path)
    kids = list(children_of(parent))
    idx = first[-1]
    remove = {idx}
    if idx > 0 and isinstance(kids[idx - 1], Keyword) and kids[idx - 1].text not in ("{", "}"):
        remove.add(idx - 1)
    kept = [c for i, c in enumerate(kids) if i not in remove]
    new_parent = with_children(parent, tuple(kept))
    if isinstance(new_parent, Group) and not kept:
        # The wrapper held only this attribute; drop it entirely.
        gp_path = parent_path[:-1]
        gp = node_at(body, gp_path) if parent_path else None
        if parent_path:
            gkids = list(children_of(gp))
            gkids.pop(parent_path[-1])
            body = _replace_at(body, gp_path, with_children(gp, tuple(gkids)))
        else:
            return rule, 0
    else:
        body = _replace_at(body, parent_path, new_parent)

    # Insert before the top-level braces (or their optional wrapper), i.e.
    # right after the rule's leading keyword.
    assert isinstance(body, Group)
    insert_at = len(body.children)
    for i, child in enumerate(body.children):
        if isinstance(child, Keyword) and child.text == "{":
            insert_at = i
            break
        if isinstance(child, Group) and _matching_brace_span(child.children) is not None:
            insert_at = i
            break
    promoted = replace(assignment, predicated=False)
    new_children = body.children[:insert_at] + (promoted,) + body.children[insert_at:]
    return replace(rule, body=replace(body, children=new_children)), 1


def _apply_make_braces_optional(rule: ParserRule, op: TransformOp) -> tuple[ParserRule, int]:
    body = rule.body
    if not isinstance(body, Group):
        return rule, 0
    span = _matching_brace_span(body.children)
    if span is None:
        return rule, 0
    lo, hi = span
    wrapped = Group(
        children=body.children[lo : hi + 1], cardinality=Cardinality.OPTIONAL
    )
    new_children = body.children[:lo] + (wrapped,) + body.children[hi + 1 :]
    return replace(rule, body=replace(body, children=new_children)), 1


def _apply_replace_rule(grammar: Grammar, op: TransformOp) -> tuple[Grammar, int]:
    if op.scope.kind is not ScopeKind.RULE or not op.scope.rule:
        raise TransformError(f"{op.describe()}: REPLACE_RULE requires a RULE scope")
    rule = find_rule(grammar, op.scope.rule)
    if op.param("remove"):
        if rule is None:
            return grammar, 0
        rules = tuple(r for r in grammar.rules if r.name != op.scope.rule)
        return replace(grammar, rules=rules), 1
    if rule is None:
        return grammar, 0
    body_text = op.param("body")
    if not isinstance(body_text, str):
        raise TransformError(f"{op.describe()}: missing body text")
    parsed = parse_rule_body(body_text)
    if not isinstance(parsed, Expression):
        details = "; ".join(str(d) for d in parsed)
        raise TransformError(f"{op.describe()}: body does not parse: {details}")
    new_rule = replace(rule, body=parsed)
    if "returns" in op.params:
        returns = op.param("returns")
        new_rule = replace(new_rule, returns_type=returns if returns else None)
    return _set_rule(grammar, new_rule), 1


_RULE_LEVEL_APPLIERS = {
    OpKind.REMOVE_KEYWORD: _apply_remove_keyword,
    OpKind.RENAME_KEYWORD: _apply_rename_keyword,
    OpKind.REMOVE_BRACES: _apply_remove_braces,
    OpKind.CHANGE_SEPARATOR: _apply_change_separator,
    OpKind.ADD_TERMINATOR: _apply_add_terminator,
    OpKind.CHANGE_CALLED_RULE: _apply_change_called_rule,
    OpKind.PROMOTE_ATTRIBUTE: _apply_promote_attribute,
    OpKind.MAKE_BRACES_OPTIONAL: _apply_make_braces_optional,
}


def apply_single(op: TransformOp, grammar: Grammar) -> tuple[Grammar, int]:
    """Apply one operation; a scope that matches nothing yields count 0."""
    if op.kind is OpKind.REPLACE_RULE:
        return _apply_replace_rule(grammar, op)
    matched = 0
    for rule in _scoped_rules(grammar, op.scope):
        if op.kind is OpKind.REMOVE_OPTIONALITY:
            new_rule, m = _apply_set_optionality(
                rule, op, Cardinality.ONE, Cardinality.OPTIONAL
            )
        elif op.kind is OpKind.ADD_OPTIONALITY:
            new_rule, m = _apply_set_optionality(
                rule, op, Cardinality.OPTIONAL, Cardinality.ONE
            )
        else:
            new_rule, m = _RULE_LEVEL_APPLIERS[op.kind](rule, op)
        if m:
            grammar = _set_rule(grammar, new_rule)
            matched += m
    return grammar, matched


def _affected_rules(before: Grammar, after: Grammar) -> tuple[str, ...]:
    before_map = {r.name: r for r in before.rules}
    names = []
    for rule in after.rules:
        old = before_map.get(rule.name)
        if old is None or old != rule:
            names.append(rule.name)
    removed = [n for n in before_map if find_rule(after, n) is None]
    return tuple(names + removed)


def apply_config(
    config: TransformationConfig, grammar: Grammar
) -> tuple[Grammar, ApplyReport]:
    """Apply all entries in canonical phase order; the input is untouched."""
    report = ApplyReport()
    ordered = sorted(config.entries, key=lambda op: PHASE_OF[op.kind])
    current = grammar
    for op in ordered:
        before = current
        current, matched = apply_single(op, current)
        report.outcomes.append(
            OpOutcome(op=op, matched=matched, rules_affected=_affected_rules(before, current))
        )
    problems = grammar_problems(current)
    if problems:
        raise TransformError(
            "config application broke grammar invariants: " + "; ".join(problems)
        )
    return current, report


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def config_to_json(config: TransformationConfig) -> str:
    entries = []
    for op in config.entries:
        scope: dict[str, object] = {"kind": op.scope.kind.value}
        if op.scope.rule is not None:
            scope["rule"] = op.scope.rule
        if op.scope.feature is not None:
            scope["feature"] = op.scope.feature
        entries.append(
            {"kind": op.kind.value, "scope": scope, "params": dict(op.params)}
        )
    doc = {"provenance": config.provenance, "entries": entries}
    return json.dumps(doc, indent=2) + "\n"


def config_from_json(text: str) -> TransformationConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise TransformError(f"invalid config JSON: {err}") from err
    if not isinstance(doc, dict) or "entries" not in doc:
        raise TransformError("invalid config JSON: missing 'entries'")
    entries = []
    for i, raw in enumerate(doc["entries"]):
        try:
            kind = OpKind(raw["kind"])
        except (KeyError, ValueError):
            raise TransformError(
                f"entry {i}: unknown operation kind {raw.get('kind')!r}"
            ) from None
        raw_scope = raw.get("scope", {})
        try:
            scope_kind = ScopeKind(raw_scope.get("kind"))
        except ValueError:
            raise TransformError(
                f"entry {i}: unknown scope kind {raw_scope.get('kind')!r}"
            ) from None
        scope = Scope(
            scope_kind,
            rule=raw_scope.get("rule"),
            feature=raw_scope.get("feature"),
        )
        entries.append(TransformOp(kind=kind, scope=scope, params=raw.get("params", {})))
    return TransformationConfig(
        entries=tuple(entries), provenance=str(doc.get("provenance", ""))
    )


def config_summary(config: TransformationConfig) -> str:
    """Human-readable one-line-per-op summary for audit output."""
    if config.is_identity:
        return "identity: 0 operations\n"
    lines = [op.describe() for op in config.entries]
    return "\n".join(lines) + "\n"
