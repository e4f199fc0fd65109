"""Context engine: loading documents and applying block directives.

A context document carries top-level statements executed exactly once at
load (terminal attaches, framework group definitions, alias registrations)
and blocks applied to every matching element, both already attached and
attached later. Directive applications are keyed by (document, block,
directive) so re-application is a no-op; across documents, the one loaded
last wins any write to the same target, and the overwrite is recorded as
shadowing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import macro
from .errors import AmbiguousAliasError, UnresolvedAliasError
from .model import Description, HeaderPattern, WorkflowElement, WILDCARD

if TYPE_CHECKING:
    from .linker import Linker


@dataclass
class RegisteredBlock:
    doc_id: str
    index: int
    block: macro.ContextBlockAst


def match_header(pattern: HeaderPattern, description: Description) -> bool:
    """True when every pattern key is present with an admitted value; the
    description may carry extra keys."""
    return pattern.matches(description)


def load_context(state: Linker, doc: macro.ContextDocumentAst) -> None:
    """Load one context document.

    Items execute in source order. Blocks are registered for for-each
    application and immediately retro-matched against already attached
    elements, so load-then-attach and attach-then-load agree for
    non-colliding documents.
    """
    block_index = 0
    for item in doc.items:
        if isinstance(item, macro.ContextBlockAst):
            registered = RegisteredBlock(doc.id, block_index, item)
            block_index += 1
            state._blocks.append(registered)
            for element in list(state.elements.values()):
                if registered.block.header.matches(element.description):
                    _apply_block(state, element, registered)
            continue
        match item:
            case macro.Attach(name):
                state.attach_element(name, Description({"Database": name}), is_terminal=True)
            case macro.FrameworkDefine(group, tasks):
                state.framework_groups[group] = list(tasks)
            case macro.NamespaceAdd(alias, pattern, _):
                state.add_alias(alias, pattern)
            case _:
                raise TypeError(f"not a context top-level statement: {item!r}")
    state.loaded_contexts.append(doc.id)


def apply_blocks(state: Linker, element: WorkflowElement) -> None:
    """Apply every matching block of every loaded document, in load order.

    Idempotent per (document, element): directives already applied to this
    element are skipped.
    """
    for registered in state._blocks:
        if registered.block.header.matches(element.description):
            _apply_block(state, element, registered)


def _apply_block(state: Linker, element: WorkflowElement, registered: RegisteredBlock) -> None:
    for position, directive in enumerate(registered.block.body):
        key = (registered.doc_id, registered.index, position)
        if key in element.applied_directives:
            continue
        element.applied_directives.add(key)
        _apply_directive(state, element, directive, registered.doc_id)


def _apply_directive(state: Linker, element: WorkflowElement, directive, doc_id: str) -> None:
    match directive:
        case macro.Define(_, key, value):
            state.set_attribute(element, key, value, origin=doc_id)
        case macro.AddDependencyPattern(_, pattern):
            state.add_dependency(element, pattern, origin=doc_id)
        case macro.Oncall(_, task, handler):
            state.register_handler(element, task, handler)
        case macro.NamespaceAdd(alias, pattern, _):
            state.add_alias(alias, pattern, element=element.name)
        case macro.Check(_, key, value):
            state.add_check(element, key, value)
        case _:
            raise TypeError(f"not a block directive: {directive!r}")


def detect_collisions(state: Linker):
    """The accumulated shadowing records; empty when no two loaded directives
    wrote the same (element, attribute). Pure read."""
    return list(state.collisions)


def resolve_alias(state: Linker, name: str) -> str:
    """Resolve a name through the alias table.

    An alias resolves to the unique attached element matching its pattern;
    a non-alias name is returned unchanged.
    """
    pattern = state.aliases.get(name)
    if pattern is None:
        return name
    matches = [el.name for el in state.elements.values() if pattern.matches(el.description)]
    if not matches:
        raise UnresolvedAliasError(f"alias {name}: pattern {pattern.canonical()} matches no attached element")
    if len(matches) > 1:
        raise AmbiguousAliasError(f"alias {name}: pattern {pattern.canonical()} matches {matches}")
    return matches[0]


def attach_aliased(state: Linker, name: str) -> WorkflowElement:
    """Attach an element by its workflow name, consulting aliases first.

    An aliased name creates the element under the alias pattern's concrete
    value, with the pattern merged into the default description; a plain name
    creates an application node named as given.
    """
    pattern = state.aliases.get(name)
    if pattern is None:
        return state.attach_element(name)
    concrete = pattern.single_value()
    if concrete is None:
        raise UnresolvedAliasError(
            f"alias {name}: pattern {pattern.canonical()} has no single concrete value to name an element"
        )
    extra = {
        key: values[0]
        for key, values in pattern.entries.items()
        if len(values) == 1 and values[0] != WILDCARD
    }
    description = Description({"Application": concrete}).merged(extra)
    return state.attach_element(concrete, description)
