"""Tokenizer, parser, and canonical serializer for macro documents.

Two document kinds share one line-oriented grammar: workflow scripts (`.mac`)
and context documents (`.ctx`). A statement is a single line of
whitespace-separated tokens. The first token is an element name unless it is
one of the keywords ``attach``, ``framework``, ``namespace``, ``contextBlock``
or ``end``. Blank lines and lines starting with ``#`` are skipped.

Attribute values are single tokens. A value of the form ``::<name>:<attr>``
is a reference (a metadata flow from another element, or from the command
line when ``<name>`` is ``@args``); anything else is a literal. The malformed
separator ``:;`` is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MacroSyntaxError, UnclosedBlockError
from .model import FlowRef, HeaderPattern

KEYWORDS = {"attach", "framework", "namespace", "contextBlock", "end"}

# Verbs that may follow an element name.
_ELEMENT_VERBS = {"adddep", "define", "oncall", "add", "namespace", "check"}


@dataclass
class Attach:
    name: str


@dataclass
class AddDep:
    element: str
    target: str


@dataclass
class Define:
    element: str | None
    key: str
    value: str | FlowRef


@dataclass
class FrameworkDefine:
    group: str
    tasks: tuple[str, ...]


@dataclass
class FrameworkRun:
    pass


@dataclass
class NamespaceAdd:
    alias: str
    pattern: HeaderPattern
    element: str | None = None


@dataclass
class Oncall:
    element: str | None
    task: str
    handler: str


@dataclass
class AddDependencyPattern:
    element: str | None
    pattern: HeaderPattern


@dataclass
class Check:
    element: str | None
    key: str
    value: str | FlowRef


Statement = (
    Attach
    | AddDep
    | Define
    | FrameworkDefine
    | FrameworkRun
    | NamespaceAdd
    | Oncall
    | AddDependencyPattern
    | Check
)


@dataclass
class ContextBlockAst:
    """A header pattern plus directives applied to every matching element."""

    header: HeaderPattern
    body: list[Statement]


@dataclass
class ContextDocumentAst:
    """Blocks and top-level statements of one context document, in order."""

    id: str
    items: list[Statement | ContextBlockAst]


def parse_value(token: str, line_no: int) -> str | FlowRef:
    if token.startswith(":;"):
        raise MacroSyntaxError(line_no, f"malformed reference separator ':;' in {token!r}")
    if token.startswith("::"):
        body = token[2:]
        name, sep, attr = body.partition(":")
        if not sep or not name or not attr or ":" in attr:
            raise MacroSyntaxError(line_no, f"malformed reference {token!r}, expected ::name:attr")
        return FlowRef(name, attr)
    return token


def _parse_pattern(token: str, line_no: int) -> HeaderPattern:
    try:
        return HeaderPattern.parse(token)
    except ValueError as exc:
        raise MacroSyntaxError(line_no, str(exc)) from exc


def _parse_element_statement(tokens: list[str], line_no: int) -> Statement:
    element = tokens[0]
    verb = tokens[1]
    rest = tokens[2:]
    if verb == "adddep" and len(rest) == 1:
        return AddDep(element, rest[0])
    if verb == "define" and len(rest) == 2:
        return Define(element, rest[0], parse_value(rest[1], line_no))
    if verb == "oncall" and len(rest) == 3 and rest[1] == "do":
        return Oncall(element, rest[0], rest[2])
    if verb == "add" and len(rest) == 2 and rest[0] == "dependency":
        return AddDependencyPattern(element, _parse_pattern(rest[1], line_no))
    if verb == "namespace" and len(rest) == 3 and rest[0] == "add":
        return NamespaceAdd(rest[1], _parse_pattern(rest[2], line_no), element=element)
    if verb == "check" and len(rest) == 2:
        return Check(element, rest[0], parse_value(rest[1], line_no))
    raise MacroSyntaxError(line_no, f"unrecognized statement: {' '.join(tokens)!r}")


def _parse_statement(tokens: list[str], line_no: int) -> Statement:
    head = tokens[0]
    if head == "attach":
        if len(tokens) != 2:
            raise MacroSyntaxError(line_no, "attach takes exactly one element name")
        return Attach(tokens[1])
    if head == "framework":
        if len(tokens) == 2 and tokens[1] == "run":
            return FrameworkRun()
        if len(tokens) == 4 and tokens[1] == "define":
            tasks = tuple(t for t in tokens[3].split(",") if t)
            if not tasks:
                raise MacroSyntaxError(line_no, "framework define needs a task list")
            return FrameworkDefine(tokens[2], tasks)
        raise MacroSyntaxError(line_no, f"unrecognized framework statement: {' '.join(tokens)!r}")
    if head == "namespace":
        if len(tokens) == 4 and tokens[1] == "add":
            return NamespaceAdd(tokens[2], _parse_pattern(tokens[3], line_no))
        raise MacroSyntaxError(line_no, f"unrecognized namespace statement: {' '.join(tokens)!r}")
    if head == "end":
        raise MacroSyntaxError(line_no, "'end' outside a contextBlock")
    if len(tokens) >= 2 and tokens[1] in _ELEMENT_VERBS:
        return _parse_element_statement(tokens, line_no)
    raise MacroSyntaxError(line_no, f"unrecognized statement: {' '.join(tokens)!r}")


def _lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line.split()


def parse_workflow(text: str) -> list[Statement]:
    """Parse a workflow document into statements in source order."""
    statements: list[Statement] = []
    for line_no, tokens in _lines(text):
        if tokens[0] == "contextBlock":
            raise MacroSyntaxError(line_no, "contextBlock not allowed in a workflow document")
        statements.append(_parse_statement(tokens, line_no))
    return statements


_BLOCK_VERBS = {"define", "add", "oncall", "namespace", "check"}
_TOPLEVEL_CONTEXT = (Attach, FrameworkDefine, NamespaceAdd)


def _parse_block_statement(tokens: list[str], line_no: int) -> Statement:
    verb = tokens[0]
    rest = tokens[1:]
    if verb == "define" and len(rest) == 2:
        return Define(None, rest[0], parse_value(rest[1], line_no))
    if verb == "add" and len(rest) == 2 and rest[0] == "dependency":
        return AddDependencyPattern(None, _parse_pattern(rest[1], line_no))
    if verb == "oncall" and len(rest) == 3 and rest[1] == "do":
        return Oncall(None, rest[0], rest[2])
    if verb == "namespace" and len(rest) == 3 and rest[0] == "add":
        return NamespaceAdd(rest[1], _parse_pattern(rest[2], line_no))
    if verb == "check" and len(rest) == 2:
        return Check(None, rest[0], parse_value(rest[1], line_no))
    raise MacroSyntaxError(line_no, f"unrecognized block directive: {' '.join(tokens)!r}")


def parse_context(text: str, id: str) -> ContextDocumentAst:
    """Parse a context document: blocks plus restricted top-level statements."""
    items: list[Statement | ContextBlockAst] = []
    block: ContextBlockAst | None = None
    block_line = 0
    for line_no, tokens in _lines(text):
        if block is not None:
            if tokens == ["end"]:
                items.append(block)
                block = None
            elif tokens[0] == "contextBlock":
                raise MacroSyntaxError(line_no, "contextBlock may not nest")
            elif tokens[0] in _BLOCK_VERBS:
                block.body.append(_parse_block_statement(tokens, line_no))
            else:
                raise MacroSyntaxError(line_no, f"statement not allowed in a block: {' '.join(tokens)!r}")
            continue
        if tokens[0] == "contextBlock":
            if len(tokens) != 2:
                raise MacroSyntaxError(line_no, "contextBlock takes exactly one header pattern")
            block = ContextBlockAst(_parse_pattern(tokens[1], line_no), [])
            block_line = line_no
            continue
        statement = _parse_statement(tokens, line_no)
        if not isinstance(statement, _TOPLEVEL_CONTEXT) or isinstance(statement, NamespaceAdd) and statement.element:
            raise MacroSyntaxError(
                line_no, f"only attach, framework define and namespace add allowed at top level: {' '.join(tokens)!r}"
            )
        items.append(statement)
    if block is not None:
        raise UnclosedBlockError(block_line, "contextBlock without matching 'end'")
    return ContextDocumentAst(id, items)


def render_statement(statement: Statement) -> str:
    """Canonical one-line text of a statement (element prefix included).

    For statements inside a block body render with ``element=None``; the
    element prefix is then omitted.
    """
    prefix = ""
    element = getattr(statement, "element", None)
    if element:
        prefix = f"{element} "
    match statement:
        case Attach(name):
            return f"attach {name}"
        case AddDep(owner, target):
            return f"{owner} adddep {target}"
        case Define(_, key, value):
            return f"{prefix}define {key} {value}"
        case FrameworkDefine(group, tasks):
            return f"framework define {group} {','.join(tasks)}"
        case FrameworkRun():
            return "framework run"
        case NamespaceAdd(alias, pattern, _):
            return f"{prefix}namespace add {alias} {pattern.canonical()}"
        case Oncall(_, task, handler):
            return f"{prefix}oncall {task} do {handler}"
        case AddDependencyPattern(_, pattern):
            return f"{prefix}add dependency {pattern.canonical()}"
        case Check(_, key, value):
            return f"{prefix}check {key} {value}"
    raise TypeError(f"not a statement: {statement!r}")


def serialize(source) -> str:
    """Serialize statements (or anything with ``to_statements()``, such as a
    Linker) to canonical macro text, one statement per line."""
    if hasattr(source, "to_statements"):
        source = source.to_statements()
    lines = [render_statement(s) for s in source]
    return "".join(line + "\n" for line in lines)
