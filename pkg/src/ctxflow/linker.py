"""The Linker: mutable workflow state constrained by contexts.

A Linker holds workflow elements in insertion order, the framework group
definitions, namespace aliases, pending equality checks, and the provenance
log. Loading context documents registers their blocks; attaching an element
applies every matching block to it. The state is fully reduced once no
attribute holds a FlowRef.

Single-writer contract: one logical thread mutates a Linker at a time; a
fully reduced state is safe to share read-only.
"""

from __future__ import annotations

from . import context, framework, macro
from .errors import DuplicateElementError, UnknownElementError, UnknownHandlerError
from .model import (
    ARGS_SOURCE,
    WORKFLOW_ORIGIN,
    CheckConstraint,
    CollisionRecord,
    Description,
    FlowRef,
    HeaderPattern,
    ReductionEvent,
    WorkflowElement,
    render_value,
)


class Linker:
    def __init__(self):
        self.elements: dict[str, WorkflowElement] = {}
        self.framework_groups: dict[str, list[str]] = {}
        self.aliases: dict[str, HeaderPattern] = {}
        self.loaded_contexts: list[str] = []
        self.checks: list[CheckConstraint] = []
        self.provenance: list[ReductionEvent] = []
        self.collisions: list[CollisionRecord] = []
        self.kv_sources: list = []
        self.handler_library: dict = framework.builtin_handlers()
        self.framework_run_requested = False
        self._blocks: list[context.RegisteredBlock] = []
        self._seq = 0
        self._flow_total = 0

    # -- element access ----------------------------------------------------

    def require_element(self, element: str | WorkflowElement) -> WorkflowElement:
        """Look up an element, resolving through aliases first."""
        if isinstance(element, WorkflowElement):
            return element
        name = context.resolve_alias(self, element)
        found = self.elements.get(name)
        if found is None:
            raise UnknownElementError(element)
        return found

    def resolve_alias(self, name: str) -> str:
        return context.resolve_alias(self, name)

    # -- construction ------------------------------------------------------

    def attach_element(
        self,
        name: str,
        description: Description | None = None,
        is_terminal: bool = False,
    ) -> WorkflowElement:
        """Attach a new element and apply every loaded context block to it.

        Bare application nodes get the default description
        ``{Application: name}``; bare terminals get ``{Database: name}``.
        """
        if name in self.elements:
            raise DuplicateElementError(name)
        if description is None:
            key = "Database" if is_terminal else "Application"
            description = Description({key: name})
        element = WorkflowElement(name=name, description=description, is_terminal=is_terminal)
        self.elements[name] = element
        context.apply_blocks(self, element)
        return element

    def attach(self, name: str) -> WorkflowElement:
        """Alias-aware attach, the semantics of a workflow ``attach`` statement."""
        return context.attach_aliased(self, name)

    def set_attribute(
        self,
        element: str | WorkflowElement,
        key: str,
        value: str | FlowRef,
        origin: str = WORKFLOW_ORIGIN,
        record: bool = True,
    ) -> None:
        """Store an attribute value.

        At most one FlowRef exists per attribute: writing over one replaces
        it. Overwrites are logged as shadowing unless value and origin both
        repeat (an idempotent re-write). Internal writes pass ``record=False``
        to skip the replay history and shadow log.
        """
        el = self.require_element(element)
        had = key in el.attributes
        old = el.attributes.get(key)
        old_origin = el.attr_origins.get(key)
        if record and had and not (old == value and old_origin == origin):
            self._log_shadow(el, key, old, old_origin, value, origin)
        if isinstance(old, FlowRef):
            self._flow_total -= 1
        if isinstance(value, FlowRef):
            self._flow_total += 1
        el.attributes[key] = value
        el.attr_origins[key] = origin
        if record and not had:
            el.history.append(("define", key))

    def add_dependency(
        self,
        element: str | WorkflowElement,
        target: str | HeaderPattern,
        origin: str = WORKFLOW_ORIGIN,
        record: bool = True,
    ) -> None:
        """Append a dependency; duplicates are ignored.

        Name targets resolve through aliases and must exist. Pattern targets
        are matched lazily at ordering time, and additionally register the
        pattern's value as a namespace alias so flows can reference matching
        elements by description.
        """
        el = self.require_element(element)
        if isinstance(target, str):
            resolved = self.resolve_alias(target)
            if resolved not in self.elements:
                raise UnknownElementError(target)
            if any(dep == resolved for dep in el.dependencies if isinstance(dep, str)):
                return
            el.dependencies.append(resolved)
            if record:
                el.history.append(("adddep", resolved))
        else:
            if any(dep == target for dep in el.dependencies if isinstance(dep, HeaderPattern)):
                return
            el.dependencies.append(target)
            alias = target.single_value()
            if alias is not None:
                self.aliases[alias] = target
            if record:
                el.history.append(("deppattern", alias, target))

    def add_alias(
        self,
        alias: str,
        pattern: HeaderPattern,
        element: str | None = None,
        record: bool = True,
    ) -> None:
        """Register a namespace alias; element-scoped registrations are
        remembered in that element's replay history."""
        self.aliases[alias] = pattern
        if element is not None and record:
            el = self.require_element(element)
            if not _history_has_alias(el, alias, pattern):
                el.history.append(("nsadd", alias, pattern))

    def register_handler(self, element: str | WorkflowElement, task: str, handler_name: str) -> None:
        """Bind a library handler to a framework task; rebinding replaces."""
        el = self.require_element(element)
        if handler_name not in self.handler_library:
            raise UnknownHandlerError(handler_name)
        rebind = task in el.handlers
        el.handlers[task] = handler_name
        if not rebind:
            el.history.append(("oncall", task))

    def add_check(self, element: str | WorkflowElement, key: str, expected: str | FlowRef) -> None:
        el = self.require_element(element)
        self.checks.append(CheckConstraint(el.name, key, expected))
        el.history.append(("check", key, expected))

    def add_kv_source(self, source) -> None:
        self.kv_sources.append(source)

    # -- context engine ----------------------------------------------------

    def load_context(self, doc: macro.ContextDocumentAst) -> None:
        context.load_context(self, doc)

    def apply_blocks(self, element: str | WorkflowElement) -> None:
        context.apply_blocks(self, self.require_element(element))

    def detect_collisions(self) -> list[CollisionRecord]:
        return list(self.collisions)

    # -- queries -----------------------------------------------------------

    def flow_count(self) -> int:
        """Number of unreduced metadata flows across all elements."""
        return self._flow_total

    def is_fully_reduced(self) -> bool:
        return self._flow_total == 0

    def metadata_subgraph(self) -> list[tuple[str, str]]:
        """One (source element, target element) edge per flow; ``@args``
        sources map to the synthetic ``@args`` node."""
        from . import reduction

        edges: list[tuple[str, str]] = []
        for el in self.elements.values():
            for value in el.attributes.values():
                if not isinstance(value, FlowRef):
                    continue
                if value.source == ARGS_SOURCE:
                    edges.append((ARGS_SOURCE, el.name))
                else:
                    source = reduction.resolve_source(self, el, value)
                    edges.append((source.name, el.name))
        return edges

    # -- statement interpreter ----------------------------------------------

    def run_statements(self, statements) -> None:
        """Execute parsed workflow statements against this state.

        ``framework run`` only records the request; dispatching messages is
        an explicit, separate step (see framework.run_framework).
        """
        for statement in statements:
            match statement:
                case macro.Attach(name):
                    self.attach(name)
                case macro.AddDep(element, target):
                    self.add_dependency(element, target)
                case macro.Define(element, key, value):
                    self.set_attribute(element, key, value)
                case macro.FrameworkDefine(group, tasks):
                    self.framework_groups[group] = list(tasks)
                case macro.FrameworkRun():
                    self.framework_run_requested = True
                case macro.NamespaceAdd(alias, pattern, element):
                    self.add_alias(alias, pattern, element=element)
                case macro.Oncall(element, task, handler):
                    self.register_handler(element, task, handler)
                case macro.AddDependencyPattern(element, pattern):
                    self.add_dependency(element, pattern)
                case macro.Check(element, key, value):
                    self.add_check(element, key, value)
                case _:
                    raise TypeError(f"not a workflow statement: {statement!r}")

    # -- serialization -----------------------------------------------------

    def to_statements(self) -> list:
        """Replay the state as macro statements: framework defines, terminal
        attaches with their history, application elements with theirs, then
        ``framework run`` if the workflow requested it."""
        statements: list = []
        for group, tasks in self.framework_groups.items():
            statements.append(macro.FrameworkDefine(group, tuple(tasks)))
        terminals = [el for el in self.elements.values() if el.is_terminal]
        applications = [el for el in self.elements.values() if not el.is_terminal]
        for el in terminals + applications:
            statements.append(macro.Attach(el.name))
            statements.extend(self._history_statements(el))
        if self.framework_run_requested:
            statements.append(macro.FrameworkRun())
        return statements

    def _history_statements(self, el: WorkflowElement) -> list:
        out: list = []
        for entry in el.history:
            match entry:
                case ("define", key):
                    out.append(macro.Define(el.name, key, el.attributes[key]))
                case ("adddep", name):
                    out.append(macro.AddDep(el.name, name))
                case ("deppattern", alias, pattern):
                    out.append(macro.AddDependencyPattern(el.name, pattern))
                    if alias is not None:
                        out.append(macro.NamespaceAdd(alias, pattern, element=el.name))
                case ("nsadd", alias, pattern):
                    out.append(macro.NamespaceAdd(alias, pattern, element=el.name))
                case ("oncall", task):
                    out.append(macro.Oncall(el.name, task, el.handlers[task]))
                case ("check", key, value):
                    out.append(macro.Check(el.name, key, value))
        return out

    # -- logging -----------------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def log_reduce(self, element: str, attribute: str, source: str, source_attr: str, value: str, doc: str) -> None:
        self.provenance.append(
            ReductionEvent(
                seq=self._next_seq(),
                kind=ReductionEvent.REDUCE,
                element=element,
                attribute=attribute,
                source=source,
                source_attr=source_attr,
                value=value,
                doc=doc,
            )
        )

    def _log_shadow(self, el, key, old, old_origin, new, new_origin) -> None:
        self.provenance.append(
            ReductionEvent(
                seq=self._next_seq(),
                kind=ReductionEvent.SHADOW,
                element=el.name,
                attribute=key,
                old_doc=old_origin,
                new_doc=new_origin,
            )
        )
        self.collisions.append(
            CollisionRecord(
                element=el.name,
                attribute=key,
                old_value=render_value(old),
                old_doc=old_origin,
                new_value=render_value(new),
                new_doc=new_origin,
            )
        )


def _history_has_alias(el: WorkflowElement, alias: str, pattern: HeaderPattern) -> bool:
    for entry in el.history:
        if entry[0] in ("deppattern", "nsadd") and entry[1] == alias and entry[2] == pattern:
            return True
    return False
