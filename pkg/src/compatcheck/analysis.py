"""Call-site extraction and caller/callee signature comparison.

The source side contributes variable types and method invocations pulled
out of parsed trees; the component side contributes the compiled class-file
surface.  ``method_called`` confronts the two and collects one mismatch
report per incompatible call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import aslt
from .aslt import AsltNode
from .classfile import (
    CONSTRUCTOR_NAME,
    ClassInfo,
    Diagnostic,
    MethodSignature,
    TypeName,
    scan_classfiles,
)
from .config import ProjectConfig

# The subset has no import statements; these well-known names are treated
# as implicitly imported.  Everything else is taken verbatim.
DEFAULT_IMPORTS = {
    "String": "java.lang.String",
    "Object": "java.lang.Object",
}

# Standard primitive widening chains (byte -> ... -> double, char -> int -> ...).
WIDENING = {
    "byte": ("short", "int", "long", "float", "double"),
    "short": ("int", "long", "float", "double"),
    "char": ("int", "long", "float", "double"),
    "int": ("long", "float", "double"),
    "long": ("float", "double"),
    "float": ("double",),
}

_LITERAL_TYPES = {
    "string": TypeName("java.lang.String"),
    "integer": TypeName("int"),
    "floating": TypeName("double"),
    "char": TypeName("char"),
    "boolean": TypeName("boolean"),
}


@dataclass(frozen=True)
class Unresolved:
    """A type the analyser could not determine statically."""

    def __str__(self) -> str:
        return "Unresolved"


@dataclass(frozen=True)
class Unconstrained:
    """A call context that imposes no expected return type."""

    def __str__(self) -> str:
        return "Unconstrained"


UNRESOLVED = Unresolved()
UNCONSTRAINED = Unconstrained()


@dataclass(frozen=True)
class Scope:
    """Where a name is visible: a class, optionally narrowed to a method."""

    class_name: str
    method_name: str | None = None

    def __str__(self) -> str:
        if self.method_name:
            return f"{self.class_name}.{self.method_name}"
        return self.class_name


@dataclass(frozen=True)
class Location:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class VariableBinding:
    variable_name: str
    declared_type: TypeName
    scope: Scope


@dataclass(frozen=True)
class CallSite:
    """One method invocation with everything the comparison needs."""

    caller_class: str
    caller_method: str | None
    receiver_class: TypeName | Unresolved
    invoked_name: str
    argument_types: tuple[TypeName | Unresolved, ...]
    expected_return: TypeName | Unconstrained
    location: Location

    def __str__(self) -> str:
        return f"{self.receiver_class}.{self.invoked_name}"


class MismatchKind(Enum):
    UNKNOWN_CLASS = "UnknownClass"
    UNKNOWN_METHOD = "UnknownMethod"
    ARITY_MISMATCH = "ArityMismatch"
    PARAM_TYPE_MISMATCH = "ParamTypeMismatch"
    RETURN_TYPE_MISMATCH = "ReturnTypeMismatch"
    UNRESOLVED_ARGUMENT = "UnresolvedArgument"


@dataclass(frozen=True)
class MismatchReport:
    """One incompatibility between a call and the called component.

    The expected side comes from the compiled class file, the given side
    from the caller's tree.  Fields that cannot exist for UnknownClass or
    UnknownMethod reports are ``None`` (rendered "n/a").
    """

    kind: MismatchKind
    aslt_class_name: str
    called_class_file: str | None
    called_method: str
    expected_parameters: tuple[TypeName, ...] | None
    given_parameters: tuple[TypeName | Unresolved, ...] | None
    expected_return: TypeName | None
    given_return: TypeName | Unconstrained | None
    location: Location


def canonical_name(name: str) -> str:
    return DEFAULT_IMPORTS.get(name, name)


def source_type_name(node: AsltNode) -> TypeName:
    """TypeName for a TypeReference node, canonicalizing default imports."""
    name = node.attributes.get("name", "")
    dims = int(node.attributes.get("dims", "0"))
    return TypeName(canonical_name(name), dims)


def get_class_infos(config: ProjectConfig) -> tuple[list[ClassInfo], list[Diagnostic]]:
    """Collect the compiled surface of every component under the project path."""
    return scan_classfiles(config.path_to_application, config.class_file_extension)


# ---------------------------------------------------------------------------
# Variable bindings
# ---------------------------------------------------------------------------

def get_all_variables_types(tree: AsltNode) -> tuple[list[VariableBinding], list[Diagnostic]]:
    """One binding per field, parameter and local declarator, in source order.

    A duplicate name in the same scope yields a diagnostic; the first
    binding stands.
    """
    bindings: list[VariableBinding] = []
    diagnostics: list[Diagnostic] = []
    file_name = tree.attributes.get("file", "")
    seen: set[tuple[Scope, str]] = set()

    def add(name: str, declared: TypeName, scope: Scope) -> None:
        key = (scope, name)
        if key in seen:
            diagnostics.append(
                Diagnostic(file_name, f"duplicate variable {name!r} in scope {scope}")
            )
            return
        seen.add(key)
        bindings.append(VariableBinding(name, declared, scope))

    for class_node in tree.children:
        if class_node.kind != aslt.CLASS_DECLARATION:
            continue
        class_scope = Scope(class_node.attributes.get("name", ""))
        for member in class_node.children:
            if member.kind == aslt.FIELD_DECLARATION:
                type_node = member.first(aslt.TYPE_REFERENCE)
                if type_node is not None:
                    add(member.attributes.get("name", ""), source_type_name(type_node), class_scope)
            elif member.kind == aslt.METHOD_DECLARATION:
                scope = Scope(class_scope.class_name, member.attributes.get("name", ""))
                for child in member.children:
                    if child.kind == aslt.PARAMETER_DECLARATION:
                        type_node = child.first(aslt.TYPE_REFERENCE)
                        if type_node is not None:
                            add(child.attributes.get("name", ""), source_type_name(type_node), scope)
                    elif child.kind == aslt.BLOCK:
                        for node in aslt.iter_nodes(child):
                            if node.kind != aslt.VARIABLE_DECLARATION or not node.children:
                                continue
                            declared = source_type_name(node.children[0])
                            for declarator in node.children[1:]:
                                add(declarator.attributes.get("name", ""), declared, scope)
    return bindings, diagnostics


def _lookup_binding(
    name: str, bindings: list[VariableBinding], scope: Scope
) -> VariableBinding | None:
    """Innermost match: method scope first, then the class's fields."""
    if scope.method_name is not None:
        for binding in bindings:
            if binding.variable_name == name and binding.scope == scope:
                return binding
    field_scope = Scope(scope.class_name)
    for binding in bindings:
        if binding.variable_name == name and binding.scope == field_scope:
            return binding
    return None


def _find_class(classes: list[ClassInfo], name: str) -> ClassInfo | None:
    for info in classes:
        if info.qualified_name == name:
            return info
    return None


def _resolve_receiver(
    node: AsltNode, bindings: list[VariableBinding], classes: list[ClassInfo], scope: Scope
) -> TypeName | Unresolved:
    """Receiver of an invocation: a bound variable, a class (static call),
    or the enclosing class for bare calls."""
    if len(node.children) < 2:
        return TypeName(scope.class_name)
    receiver = node.children[0]
    name = receiver.attributes.get("name", "")
    binding = _lookup_binding(name, bindings, scope)
    if binding is not None:
        return binding.declared_type
    class_name = canonical_name(name)
    if _find_class(classes, class_name) is not None:
        return TypeName(class_name)
    return UNRESOLVED


def resolve_argument_type(
    arg: AsltNode,
    bindings: list[VariableBinding],
    classes: list[ClassInfo],
    scope: Scope,
) -> TypeName | Unresolved:
    """Static type of an argument expression, or Unresolved.

    Identifiers use the innermost binding; literals map to their category's
    type; ``new T(...)`` is ``T``; a nested invocation resolves only when
    its target signature is unique.
    """
    if arg.kind == aslt.IDENTIFIER_EXPRESSION:
        binding = _lookup_binding(arg.attributes.get("name", ""), bindings, scope)
        return binding.declared_type if binding is not None else UNRESOLVED
    if arg.kind == aslt.LITERAL_TAG:
        return _LITERAL_TYPES.get(arg.attributes.get("category", ""), UNRESOLVED)
    if arg.kind == aslt.NEW_OBJECT_EXPRESSION and arg.children:
        return source_type_name(arg.children[0])
    if arg.kind == aslt.METHOD_INVOKE_EXPRESSION:
        receiver = _resolve_receiver(arg, bindings, classes, scope)
        if isinstance(receiver, Unresolved) or receiver.dims:
            return UNRESOLVED
        info = _find_class(classes, receiver.name)
        if info is None:
            return UNRESOLVED
        name = arg.attributes.get("name", "")
        candidates = [m for m in info.methods if m.name == name]
        if len(candidates) == 1:
            return candidates[0].return_type
        return UNRESOLVED
    return UNRESOLVED


# ---------------------------------------------------------------------------
# Call sites
# ---------------------------------------------------------------------------

def _location(node: AsltNode) -> Location:
    if node.span is None:
        return Location("", 0, 0)
    return Location(node.span.file, node.span.start_line, node.span.start_column)


def get_all_method_calls(
    tree: AsltNode, bindings: list[VariableBinding], classes: list[ClassInfo]
) -> list[CallSite]:
    """Every invocation (and object creation, as ``<init>``) in source order.

    The expected return type is taken from context: the declared type of an
    initialized declarator or field, or the bound type of an assignment's
    left side; anywhere else it is unconstrained.
    """
    calls: list[CallSite] = []

    def visit(node: AsltNode, scope: Scope, expected: TypeName | Unconstrained) -> None:
        if node.kind == aslt.METHOD_INVOKE_EXPRESSION:
            arguments = node.children[-1] if node.children else None
            argument_nodes = arguments.children if arguments is not None else ()
            calls.append(
                CallSite(
                    caller_class=scope.class_name,
                    caller_method=scope.method_name,
                    receiver_class=_resolve_receiver(node, bindings, classes, scope),
                    invoked_name=node.attributes.get("name", ""),
                    argument_types=tuple(
                        resolve_argument_type(a, bindings, classes, scope) for a in argument_nodes
                    ),
                    expected_return=expected,
                    location=_location(node),
                )
            )
            for argument in argument_nodes:
                visit(argument, scope, UNCONSTRAINED)
        elif node.kind == aslt.NEW_OBJECT_EXPRESSION and len(node.children) == 2:
            type_node, arguments = node.children
            calls.append(
                CallSite(
                    caller_class=scope.class_name,
                    caller_method=scope.method_name,
                    receiver_class=source_type_name(type_node),
                    invoked_name=CONSTRUCTOR_NAME,
                    argument_types=tuple(
                        resolve_argument_type(a, bindings, classes, scope)
                        for a in arguments.children
                    ),
                    expected_return=UNCONSTRAINED,
                    location=_location(node),
                )
            )
            for argument in arguments.children:
                visit(argument, scope, UNCONSTRAINED)

    def visit_statement(node: AsltNode, scope: Scope) -> None:
        if node.kind == aslt.VARIABLE_DECLARATION and node.children:
            declared = source_type_name(node.children[0])
            for declarator in node.children[1:]:
                if declarator.children:
                    visit(declarator.children[0], scope, declared)
        elif node.kind == aslt.EXPRESSION_STATEMENT and node.children:
            inner = node.children[0]
            if inner.kind == aslt.SIMPLE_ASSIGNMENT_EXPRESSION and len(inner.children) == 2:
                target, value = inner.children
                binding = _lookup_binding(target.attributes.get("name", ""), bindings, scope)
                expected = binding.declared_type if binding is not None else UNCONSTRAINED
                visit(value, scope, expected)
            else:
                visit(inner, scope, UNCONSTRAINED)
        elif node.kind == aslt.RETURN_STATEMENT and node.children:
            visit(node.children[0], scope, UNCONSTRAINED)

    for class_node in tree.children:
        if class_node.kind != aslt.CLASS_DECLARATION:
            continue
        class_name = class_node.attributes.get("name", "")
        for member in class_node.children:
            if member.kind == aslt.FIELD_DECLARATION and len(member.children) == 2:
                declared = source_type_name(member.children[0])
                visit(member.children[1], Scope(class_name), declared)
            elif member.kind == aslt.METHOD_DECLARATION:
                scope = Scope(class_name, member.attributes.get("name", ""))
                block = member.first(aslt.BLOCK)
                if block is not None:
                    for statement in block.children:
                        visit_statement(statement, scope)
    return calls


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

def _assignable(arg: TypeName, param: TypeName, widening: bool) -> bool:
    if arg == param:
        return True
    if not widening or arg.dims or param.dims:
        return False
    return param.name in WIDENING.get(arg.name, ())


def _matches(call: CallSite, signature: MethodSignature, widening: bool) -> bool:
    if len(call.argument_types) != len(signature.parameter_types):
        return False
    for arg, param in zip(call.argument_types, signature.parameter_types):
        if not isinstance(arg, TypeName) or not _assignable(arg, param, widening):
            return False
    return (
        isinstance(call.expected_return, Unconstrained)
        or call.expected_return == signature.return_type
    )


def _report(
    call: CallSite,
    kind: MismatchKind,
    info: ClassInfo | None,
    signature: MethodSignature | None,
) -> MismatchReport:
    called_class_file = None
    if info is not None:
        called_class_file = info.source_file_name or info.qualified_name
    return MismatchReport(
        kind=kind,
        aslt_class_name=call.caller_class,
        called_class_file=called_class_file,
        called_method=call.invoked_name,
        expected_parameters=signature.parameter_types if signature is not None else None,
        given_parameters=call.argument_types,
        expected_return=signature.return_type if signature is not None else None,
        given_return=call.expected_return,
        location=call.location,
    )


def method_called(
    calls: list[CallSite], classes: list[ClassInfo], widening: bool = False
) -> list[MismatchReport]:
    """Compare every call against the classes' surfaces; collect all errors.

    A call matching any overload yields no report.  Otherwise the nearest
    candidate (same arity preferred, then declaration order) is blamed and
    the kind is the first failing check in the order arity, parameter
    types, return type; a call with any unresolved argument is reported as
    UnresolvedArgument.  Constructor calls on classes that are not present
    are allowed silently.  Reports are ordered by location.
    """
    by_name: dict[str, ClassInfo] = {}
    for info in classes:
        by_name.setdefault(info.qualified_name, info)

    reports: list[MismatchReport] = []
    for call in calls:
        receiver = call.receiver_class
        info = None
        if isinstance(receiver, TypeName) and receiver.dims == 0:
            info = by_name.get(receiver.name)
        if info is None:
            if call.invoked_name == CONSTRUCTOR_NAME:
                continue  # partially available black-box component
            reports.append(_report(call, MismatchKind.UNKNOWN_CLASS, None, None))
            continue
        candidates = [m for m in info.methods if m.name == call.invoked_name]
        if not candidates:
            reports.append(_report(call, MismatchKind.UNKNOWN_METHOD, info, None))
            continue
        if any(_matches(call, signature, widening) for signature in candidates):
            continue
        nearest = next(
            (m for m in candidates if len(m.parameter_types) == len(call.argument_types)),
            candidates[0],
        )
        if any(isinstance(arg, Unresolved) for arg in call.argument_types):
            kind = MismatchKind.UNRESOLVED_ARGUMENT
        elif len(call.argument_types) != len(nearest.parameter_types):
            kind = MismatchKind.ARITY_MISMATCH
        elif not all(
            _assignable(arg, param, widening)
            for arg, param in zip(call.argument_types, nearest.parameter_types)
        ):
            kind = MismatchKind.PARAM_TYPE_MISMATCH
        else:
            kind = MismatchKind.RETURN_TYPE_MISMATCH
        reports.append(_report(call, kind, info, nearest))

    reports.sort(key=lambda r: (r.location.file, r.location.line, r.location.column))
    return reports
