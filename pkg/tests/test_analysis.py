import random

from compatcheck import aslt
from compatcheck.analysis import (
    UNCONSTRAINED,
    UNRESOLVED,
    CallSite,
    Location,
    MismatchKind,
    Scope,
    Unresolved,
    VariableBinding,
    get_all_method_calls,
    get_all_variables_types,
    get_class_infos,
    method_called,
    resolve_argument_type,
)
from compatcheck.aslt import parse_source
from compatcheck.classfile import (
    VOID,
    ClassInfo,
    MethodSignature,
    TypeName,
    emit_classfile,
)
from compatcheck.config import ProjectConfig

from oracles import oracle_reports
from randgen import oracle_calls, oracle_classes

STRING = TypeName("java.lang.String")
INT = TypeName("int")

SAMPLE_CALLER_SOURCE = """class SampleClassA {
    void m() {
        SampleClassB sampleClassB = new SampleClassB();
        String str = "hello";
        sampleClassB.doSomething(str);
    }
}
"""

CLASS_B_OK = ClassInfo(
    "SampleClassB",
    superclass_name="java.lang.Object",
    methods=(
        MethodSignature("<init>", (), VOID),
        MethodSignature("doSomething", (STRING,), VOID),
    ),
    source_file_name="SampleClassB.class",
)

CLASS_B_FAULTY = ClassInfo(
    "SampleClassB",
    superclass_name="java.lang.Object",
    methods=(
        MethodSignature("<init>", (), VOID),
        MethodSignature("doSomething", (INT,), VOID),
    ),
    source_file_name="SampleClassB.class",
)


def _calls_for(source, classes, file_name="SampleClassA.java"):
    tree = parse_source(source, file_name=file_name)
    bindings, diagnostics = get_all_variables_types(tree)
    assert diagnostics == []
    return get_all_method_calls(tree, bindings, classes)


# ---------------------------------------------------------------------------
# Variable bindings
# ---------------------------------------------------------------------------

def test_string_variable_binding():
    tree = parse_source(SAMPLE_CALLER_SOURCE, file_name="SampleClassA.java")
    bindings, _ = get_all_variables_types(tree)
    assert VariableBinding("str", STRING, Scope("SampleClassA", "m")) in bindings


def test_no_declarations_no_bindings():
    tree = parse_source("class A { void m() { run(); } }")
    bindings, _ = get_all_variables_types(tree)
    assert bindings == []


def test_field_parameter_and_local_bindings_in_source_order():
    tree = parse_source(
        "class A { int n; void m(long p) { char c; } }", file_name="A.java"
    )
    bindings, _ = get_all_variables_types(tree)
    assert bindings == [
        VariableBinding("n", INT, Scope("A")),
        VariableBinding("p", TypeName("long"), Scope("A", "m")),
        VariableBinding("c", TypeName("char"), Scope("A", "m")),
    ]


def test_parameter_shadows_field_inside_method():
    tree = parse_source("class A { int n; void m(String n) { f(n); } }")
    bindings, _ = get_all_variables_types(tree)
    assert len(bindings) == 2
    argument = aslt.AsltNode(aslt.IDENTIFIER_EXPRESSION, {"name": "n"})
    inside = resolve_argument_type(argument, bindings, [], Scope("A", "m"))
    assert inside == STRING
    at_class_level = resolve_argument_type(argument, bindings, [], Scope("A"))
    assert at_class_level == INT


def test_duplicate_binding_keeps_first_and_reports():
    tree = parse_source("class A { void m() { int x; long x; } }", file_name="A.java")
    bindings, diagnostics = get_all_variables_types(tree)
    assert bindings == [VariableBinding("x", INT, Scope("A", "m"))]
    assert len(diagnostics) == 1
    assert "x" in diagnostics[0].message


# ---------------------------------------------------------------------------
# Argument resolution
# ---------------------------------------------------------------------------

def _ident(name):
    return aslt.AsltNode(aslt.IDENTIFIER_EXPRESSION, {"name": name})


def _literal(value, category):
    return aslt.AsltNode(aslt.LITERAL_TAG, {"value": value, "category": category})


def test_resolve_bound_identifier():
    bindings = [VariableBinding("str", STRING, Scope("A", "m"))]
    assert resolve_argument_type(_ident("str"), bindings, [], Scope("A", "m")) == STRING


def test_resolve_unbound_identifier():
    assert resolve_argument_type(_ident("ghost"), [], [], Scope("A", "m")) is UNRESOLVED


def test_resolve_literal_categories():
    scope = Scope("A", "m")
    assert resolve_argument_type(_literal("5", "integer"), [], [], scope) == INT
    assert resolve_argument_type(_literal("1.5", "floating"), [], [], scope) == TypeName("double")
    assert resolve_argument_type(_literal('"x"', "string"), [], [], scope) == STRING
    assert resolve_argument_type(_literal("'x'", "char"), [], [], scope) == TypeName("char")
    assert resolve_argument_type(_literal("true", "boolean"), [], [], scope) == TypeName("boolean")


def test_resolve_new_expression():
    node = aslt.AsltNode(
        aslt.NEW_OBJECT_EXPRESSION,
        {},
        (
            aslt.AsltNode(aslt.TYPE_REFERENCE, {"name": "SampleClassB"}),
            aslt.AsltNode(aslt.ARGUMENT_LIST),
        ),
    )
    assert resolve_argument_type(node, [], [], Scope("A", "m")) == TypeName("SampleClassB")


def test_resolve_nested_invocation_unique_target():
    bindings = [VariableBinding("b", TypeName("SampleClassB"), Scope("A", "m"))]
    node = aslt.AsltNode(
        aslt.METHOD_INVOKE_EXPRESSION,
        {"name": "getNumber"},
        (_ident("b"), aslt.AsltNode(aslt.ARGUMENT_LIST)),
    )
    classes = [ClassInfo("SampleClassB", methods=(MethodSignature("getNumber", (), INT),))]
    assert resolve_argument_type(node, bindings, classes, Scope("A", "m")) == INT


def test_resolve_nested_invocation_ambiguous_overload():
    bindings = [VariableBinding("b", TypeName("B"), Scope("A", "m"))]
    node = aslt.AsltNode(
        aslt.METHOD_INVOKE_EXPRESSION,
        {"name": "f"},
        (_ident("b"), aslt.AsltNode(aslt.ARGUMENT_LIST)),
    )
    classes = [
        ClassInfo(
            "B",
            methods=(
                MethodSignature("f", (), INT),
                MethodSignature("f", (INT,), INT),
            ),
        )
    ]
    assert resolve_argument_type(node, bindings, classes, Scope("A", "m")) is UNRESOLVED


# ---------------------------------------------------------------------------
# Call-site extraction
# ---------------------------------------------------------------------------

def test_sample_caller_call_site():
    calls = _calls_for(SAMPLE_CALLER_SOURCE, [CLASS_B_OK])
    named = [c for c in calls if c.invoked_name == "doSomething"]
    assert len(named) == 1
    call = named[0]
    assert call.receiver_class == TypeName("SampleClassB")
    assert call.argument_types == (STRING,)
    assert call.expected_return is UNCONSTRAINED
    assert call.caller_class == "SampleClassA"
    assert call.caller_method == "m"
    assert str(call) == "SampleClassB.doSomething"
    assert call.location.file == "SampleClassA.java"
    assert call.location.line == 5


def test_no_invocations_no_calls():
    assert _calls_for("class A { void m() { int x = 5; } }", []) == []


def test_declarator_context_supplies_expected_return():
    calls = _calls_for(
        "class A { void m() { SampleClassB b = new SampleClassB(); int r = b.f(5); } }",
        [CLASS_B_OK],
    )
    call = [c for c in calls if c.invoked_name == "f"][0]
    assert call.expected_return == INT
    assert call.argument_types == (INT,)


def test_assignment_context_supplies_expected_return():
    calls = _calls_for(
        "class A { void m() { int r; SampleClassB b = new SampleClassB(); r = b.f(); } }",
        [CLASS_B_OK],
    )
    call = [c for c in calls if c.invoked_name == "f"][0]
    assert call.expected_return == INT


def test_statement_position_is_unconstrained():
    calls = _calls_for(
        "class A { void m() { SampleClassB b = new SampleClassB(); b.f(); } }", [CLASS_B_OK]
    )
    call = [c for c in calls if c.invoked_name == "f"][0]
    assert call.expected_return is UNCONSTRAINED


def test_bare_call_targets_enclosing_class():
    calls = _calls_for("class A { void m() { run(); } }", [])
    assert calls[0].receiver_class == TypeName("A")


def test_static_receiver_names_known_class():
    calls = _calls_for(
        "class A { void m() { SampleClassB.doSomething(5); } }", [CLASS_B_OK]
    )
    assert calls[0].receiver_class == TypeName("SampleClassB")


def test_unknown_receiver_is_unresolved():
    calls = _calls_for("class A { void m() { mystery.f(); } }", [])
    assert isinstance(calls[0].receiver_class, Unresolved)


def test_constructor_sites_extracted_as_init():
    calls = _calls_for("class A { void m() { Widget w = new Widget(5); } }", [])
    assert [c.invoked_name for c in calls] == ["<init>"]
    assert calls[0].receiver_class == TypeName("Widget")
    assert calls[0].argument_types == (INT,)
    assert calls[0].expected_return is UNCONSTRAINED


def test_field_initializer_calls_are_extracted():
    calls = _calls_for("class A { int n = helper.get(); }", [])
    assert len(calls) == 1
    assert calls[0].caller_method is None
    assert calls[0].expected_return == INT


def test_nested_calls_in_source_order():
    calls = _calls_for(
        "class A { void m() { b.f(c.g(), d.h()); } }", []
    )
    assert [c.invoked_name for c in calls] == ["f", "g", "h"]


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

def test_string_vs_int_parameter_mismatch_report():
    calls = _calls_for(SAMPLE_CALLER_SOURCE, [CLASS_B_FAULTY])
    reports = method_called(calls, [CLASS_B_FAULTY])
    assert len(reports) == 1
    report = reports[0]
    assert report.kind is MismatchKind.PARAM_TYPE_MISMATCH
    assert report.aslt_class_name == "SampleClassA"
    assert report.called_class_file == "SampleClassB.class"
    assert report.called_method == "doSomething"
    assert report.expected_parameters == (INT,)
    assert report.given_parameters == (STRING,)
    assert report.expected_return == VOID
    assert report.given_return is UNCONSTRAINED


def test_compatible_cross_calls_produce_no_reports():
    source = """class SampleClassA {
    void m() {
        SampleClassB sampleClassB = new SampleClassB();
        SampleClassC sampleClassC = new SampleClassC();
        sampleClassB.doSomething("hi");
        int r = sampleClassC.calc(5);
    }
}
"""
    class_c = ClassInfo(
        "SampleClassC",
        methods=(MethodSignature("<init>", (), VOID), MethodSignature("calc", (INT,), INT)),
        source_file_name="SampleClassC.class",
    )
    calls = _calls_for(source, [CLASS_B_OK, class_c])
    assert method_called(calls, [CLASS_B_OK, class_c]) == []


def _call(receiver, name, args=(), expected=UNCONSTRAINED, line=1):
    return CallSite(
        caller_class="A",
        caller_method="m",
        receiver_class=receiver,
        invoked_name=name,
        argument_types=args,
        expected_return=expected,
        location=Location("A.java", line, 1),
    )


def test_unknown_class_for_unresolved_and_absent_receivers():
    classes = [CLASS_B_OK]
    reports = method_called(
        [
            _call(UNRESOLVED, "f", line=1),
            _call(TypeName("Ghost"), "f", line=2),
            _call(TypeName("SampleClassB", 1), "f", line=3),  # array receiver
            _call(INT, "f", line=4),  # primitive receiver
        ],
        classes,
    )
    assert [r.kind for r in reports] == [MismatchKind.UNKNOWN_CLASS] * 4
    assert all(r.called_class_file is None for r in reports)
    assert all(r.expected_parameters is None for r in reports)


def test_unknown_method():
    reports = method_called([_call(TypeName("SampleClassB"), "nope")], [CLASS_B_OK])
    assert [r.kind for r in reports] == [MismatchKind.UNKNOWN_METHOD]
    assert reports[0].called_class_file == "SampleClassB.class"


def test_arity_and_return_mismatches():
    info = ClassInfo("B", methods=(MethodSignature("f", (INT,), INT),))
    arity = method_called([_call(TypeName("B"), "f", (INT, INT))], [info])
    assert [r.kind for r in arity] == [MismatchKind.ARITY_MISMATCH]
    returns = method_called(
        [_call(TypeName("B"), "f", (INT,), expected=TypeName("long"))], [info]
    )
    assert [r.kind for r in returns] == [MismatchKind.RETURN_TYPE_MISMATCH]
    assert returns[0].expected_return == INT
    assert returns[0].given_return == TypeName("long")


def test_unresolved_argument_reported():
    info = ClassInfo("B", methods=(MethodSignature("f", (INT,), VOID),))
    reports = method_called([_call(TypeName("B"), "f", (UNRESOLVED,))], [info])
    assert [r.kind for r in reports] == [MismatchKind.UNRESOLVED_ARGUMENT]


def test_matching_any_overload_suppresses_report():
    info = ClassInfo(
        "B",
        methods=(
            MethodSignature("f", (INT,), VOID),
            MethodSignature("f", (STRING,), VOID),
        ),
    )
    ok = method_called([_call(TypeName("B"), "f", (STRING,))], [info])
    assert ok == []
    bad = method_called([_call(TypeName("B"), "f", (TypeName("char"),))], [info])
    assert [r.kind for r in bad] == [MismatchKind.PARAM_TYPE_MISMATCH]
    # nearest candidate has the same arity; first in declaration order
    assert bad[0].expected_parameters == (INT,)


def test_constructor_checked_only_when_class_present():
    silent = method_called([_call(TypeName("Ghost"), "<init>", (INT,))], [CLASS_B_OK])
    assert silent == []
    checked = method_called([_call(TypeName("SampleClassB"), "<init>", (INT,))], [CLASS_B_OK])
    assert [r.kind for r in checked] == [MismatchKind.ARITY_MISMATCH]


def test_widening_brute_force_over_primitive_pairs():
    # Independent oracle: the full widening relation written out.
    chains = {
        "byte": {"short", "int", "long", "float", "double"},
        "short": {"int", "long", "float", "double"},
        "char": {"int", "long", "float", "double"},
        "int": {"long", "float", "double"},
        "long": {"float", "double"},
        "float": {"double"},
        "double": set(),
        "boolean": set(),
    }
    primitives = sorted(chains)
    for source_name in primitives:
        for target_name in primitives:
            info = ClassInfo("B", methods=(MethodSignature("f", (TypeName(target_name),), VOID),))
            call = _call(TypeName("B"), "f", (TypeName(source_name),))
            strict = method_called([call], [info], widening=False)
            widened = method_called([call], [info], widening=True)
            assert (strict == []) == (source_name == target_name)
            expect_ok = source_name == target_name or target_name in chains[source_name]
            assert (widened == []) == expect_ok


def test_widening_reports_are_subset_of_strict():
    rng = random.Random(99)
    for _ in range(100):
        classes = oracle_classes(rng)
        calls = oracle_calls(rng, classes)
        strict_keys = {
            (r.location, r.called_method) for r in method_called(calls, classes, widening=False)
        }
        widened_keys = {
            (r.location, r.called_method) for r in method_called(calls, classes, widening=True)
        }
        assert widened_keys <= strict_keys


def test_reports_sorted_by_location_and_input_order_irrelevant():
    info = ClassInfo("B", methods=(MethodSignature("f", (INT,), VOID),))
    calls = [
        _call(TypeName("B"), "f", (STRING,), line=9),
        _call(TypeName("B"), "f", (STRING,), line=2),
        _call(TypeName("Ghost"), "g", line=5),
    ]
    forward = method_called(calls, [info])
    backward = method_called(list(reversed(calls)), [info])
    assert [r.location.line for r in forward] == [2, 5, 9]
    assert forward == backward


def test_duplicate_class_names_first_wins():
    first = ClassInfo("B", methods=(MethodSignature("f", (), VOID),))
    second = ClassInfo("B", methods=())
    calls = [_call(TypeName("B"), "f", ())]
    assert method_called(calls, [first, second]) == []


def test_oracle_equivalence_random_projects():
    rng = random.Random(2024)
    for _ in range(120):
        classes = oracle_classes(rng)
        calls = oracle_calls(rng, classes)
        for widening in (False, True):
            assert method_called(calls, classes, widening=widening) == oracle_reports(
                calls, classes, widening
            )


# ---------------------------------------------------------------------------
# get_class_infos
# ---------------------------------------------------------------------------

def test_get_class_infos_scans_configured_extension(tmp_path):
    for info in (CLASS_B_OK, ClassInfo("TestBed"), ClassInfo("SampleClassA")):
        (tmp_path / f"{info.qualified_name}.class").write_bytes(emit_classfile(info))
    config = ProjectConfig(path_to_application=tmp_path)
    infos, diagnostics = get_class_infos(config)
    assert [i.qualified_name for i in infos] == ["SampleClassA", "SampleClassB", "TestBed"]
    assert diagnostics == []


def test_get_class_infos_collects_diagnostics(tmp_path):
    (tmp_path / "Good.class").write_bytes(emit_classfile(ClassInfo("Good")))
    (tmp_path / "Bad.class").write_bytes(b"junk")
    infos, diagnostics = get_class_infos(ProjectConfig(path_to_application=tmp_path))
    assert [i.qualified_name for i in infos] == ["Good"]
    assert [d.file for d in diagnostics] == ["Bad.class"]
