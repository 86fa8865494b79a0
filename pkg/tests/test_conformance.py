from corpus import load_grammar
from xtadapt.conformance import (
    DEFAULT_KNOWN_TERMINALS,
    FindingKind,
    check_conformance,
    load_terminals_file,
)
from xtadapt.model import Grammar
from xtadapt.parsing import parse_grammar


def test_mission_target_passes_with_documented_terminals():
    grammar = load_grammar("mission_target.xtext")
    findings = check_conformance(grammar, {"Identifier", "UUID", "Comment"})
    assert findings == []


def test_mission_target_fails_without_terminals():
    grammar = load_grammar("mission_target.xtext")
    findings = check_conformance(grammar)
    kinds = {f.kind for f in findings}
    assert kinds == {FindingKind.UNRESOLVED_RULE_CALL}


def test_xgenerictype_generated_empty_crossref():
    grammar = load_grammar("xgenerictype_generated.xtext")
    findings = check_conformance(grammar)
    assert len(findings) == 1
    assert findings[0].kind is FindingKind.EMPTY_CROSSREF_TYPE
    assert findings[0].rule_name == "XGenericType"


def test_xgenerictype_target_passes_with_terminal():
    grammar = load_grammar("xgenerictype_target.xtext")
    assert check_conformance(grammar, {"XQualifiedName"}) == []


def test_unresolved_rule_call():
    grammar = parse_grammar("A: x=Undefined;")
    findings = check_conformance(grammar)
    assert [f.kind for f in findings] == [FindingKind.UNRESOLVED_RULE_CALL]
    assert "Undefined" in findings[0].detail


def test_rule_calls_resolve_against_rules_and_declared_terminals():
    grammar = load_grammar("port_generated.xtext")
    # compass_pt=COMPASS_PT resolves against the declared terminal.
    assert check_conformance(grammar) == []


def test_duplicate_rule_detected():
    grammar = parse_grammar("A: 'a';\n\nA: 'b';")
    findings = check_conformance(grammar)
    assert [f.kind for f in findings] == [FindingKind.DUPLICATE_RULE]


def test_missing_entry_rule():
    findings = check_conformance(Grammar())
    assert [f.kind for f in findings] == [FindingKind.MISSING_ENTRY_RULE]


def test_inconsistent_assignment_operator():
    grammar = parse_grammar("A: items+=B items=B;\n\nB: 'b';")
    findings = check_conformance(grammar)
    assert [f.kind for f in findings] == [FindingKind.INCONSISTENT_ASSIGN_OPERATOR]


def test_mixed_plain_and_boolean_operator_is_fine():
    grammar = parse_grammar("A: (x?='x')? x=ID;")
    assert check_conformance(grammar) == []


def test_undefined_crossref_terminal():
    grammar = parse_grammar("A: ref=[Thing|NoSuchTerminal];\n\nThing: 'thing' name=ID;")
    findings = check_conformance(grammar)
    assert [f.kind for f in findings] == [FindingKind.UNDEFINED_TERMINAL]


def test_short_crossref_form_has_no_terminal_finding():
    grammar = parse_grammar("A: ref=[Thing];\n\nThing: 'thing' name=ID;")
    assert check_conformance(grammar) == []


def test_default_known_terminals():
    grammar = parse_grammar("A: name=EString value=INT text=STRING id=ID;")
    assert check_conformance(grammar) == []
    assert "EString" in DEFAULT_KNOWN_TERMINALS


def test_findings_ordered_by_rule_then_position():
    grammar = parse_grammar("B: x=Nope1 y=Nope2;\n\nC: z=Nope3;")
    findings = check_conformance(grammar)
    details = [f.detail for f in findings]
    assert [d[-2] for d in details] == ["1", "2", "3"]


def test_load_terminals_file():
    text = "# known names\nIdentifier\nUUID\n\nComment\n"
    assert load_terminals_file(text) == {"Identifier", "UUID", "Comment"}


def test_catalog_ops_never_invent_references():
    """Applying a config without called-rule rewrites or replacements cannot
    introduce unresolved calls that were not already present."""
    from xtadapt.extract import extract_config
    from xtadapt.transform import OpKind, TransformationConfig, apply_config

    g1 = load_grammar("mission_generated.xtext")
    g1prime = load_grammar("mission_target.xtext")
    config = extract_config(g1, g1prime).config
    safe = TransformationConfig(
        entries=tuple(
            op
            for op in config.entries
            if op.kind not in (OpKind.CHANGE_CALLED_RULE, OpKind.REPLACE_RULE)
        )
    )
    adapted, _ = apply_config(safe, g1)

    def unresolved(grammar):
        return {
            f.detail
            for f in check_conformance(grammar)
            if f.kind is FindingKind.UNRESOLVED_RULE_CALL
        }

    assert unresolved(adapted) <= unresolved(g1)
