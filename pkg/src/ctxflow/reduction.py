"""Lazy, trigger-based reduction of metadata flows.

Reading an attribute resolves its flow on first access: the source value is
copied in, the FlowRef is replaced by the literal (removing exactly one
arrow), and a REDUCE event is appended to the provenance log. The metadata
flow subgraph must be acyclic for a reduction order to exist; cycles are an
error, not a value.

Resolution is iterative rather than recursive so long reference chains do
not hit the interpreter recursion limit.
"""

from __future__ import annotations

import heapq

from .errors import (
    CheckFailedError,
    CtxflowError,
    CycleError,
    MissingArgError,
    MissingAttributeError,
    UnresolvedSourceError,
)
from .model import ARGS_SOURCE, FlowRef, WorkflowElement


def resolve_source(state, target: WorkflowElement, ref: FlowRef) -> WorkflowElement:
    """Find the element a flow reference points at.

    Lookup order: (1) the alias table, (2) an exact element name, (3) the
    unique dependency of the target whose description carries the referenced
    name as a key. Zero or several candidates are an error.
    """
    name = ref.source
    pattern = state.aliases.get(name)
    if pattern is not None:
        matches = [el for el in state.elements.values() if pattern.matches(el.description)]
        if len(matches) == 1:
            return matches[0]
        if not matches:
            raise UnresolvedSourceError(
                f"flow source {name} in {ref}: alias pattern {pattern.canonical()} matches no element"
            )
        raise UnresolvedSourceError(
            f"flow source {name} in {ref}: alias pattern matches several elements: "
            + ", ".join(el.name for el in matches)
        )
    direct = state.elements.get(name)
    if direct is not None:
        return direct
    candidates: list[WorkflowElement] = []
    for dep in target.dependencies:
        if isinstance(dep, str):
            dep_elements = [state.elements[dep]] if dep in state.elements else []
        else:
            dep_elements = [el for el in state.elements.values() if dep.matches(el.description)]
        for el in dep_elements:
            if name in el.description.entries and el not in candidates:
                candidates.append(el)
    if len(candidates) == 1:
        return candidates[0]
    if candidates:
        raise UnresolvedSourceError(
            f"flow source {name} in {ref} is ambiguous among dependencies: "
            + ", ".join(el.name for el in candidates)
        )
    raise UnresolvedSourceError(f"flow source {name} in {ref} matches no attached element")


def _store_reduced(state, element: WorkflowElement, key: str, value: str, source: str, source_attr: str) -> None:
    # Replacing the FlowRef in place is the memoization; the flow's origin
    # document stays on the attribute for provenance.
    doc = element.attr_origins.get(key, "workflow")
    element.attributes[key] = value
    state._flow_total -= 1
    state.log_reduce(element.name, key, source, source_attr, value, doc)


def read_attribute(state, element, key: str, args: dict[str, str] | None = None) -> str:
    """Return the attribute value, reducing its flow chain on first access.

    Each flow satisfied along the way removes exactly one arrow and logs one
    REDUCE event; subsequent reads hit the stored literal.
    """
    args = {} if args is None else args
    start = state.require_element(element)
    if key not in start.attributes:
        raise MissingAttributeError(start.name, key)
    stack: list[tuple[str, str]] = [(start.name, key)]
    on_path = {(start.name, key)}
    value = ""
    while stack:
        name, attr = stack[-1]
        node = state.elements[name]
        current = node.attributes.get(attr)
        if current is None:
            raise MissingAttributeError(name, attr)
        if isinstance(current, str):
            stack.pop()
            on_path.discard((name, attr))
            value = current
            if stack:
                below_name, below_attr = stack[-1]
                below = state.elements[below_name]
                _store_reduced(state, below, below_attr, value, name, attr)
            continue
        ref = current
        if ref.source == ARGS_SOURCE:
            if ref.attr not in args:
                raise MissingArgError(ref.attr)
            _store_reduced(state, node, attr, args[ref.attr], ARGS_SOURCE, ref.attr)
            continue
        source = resolve_source(state, node, ref)
        slot = (source.name, ref.attr)
        if slot in on_path:
            path = [f"{e}.{a}" for e, a in stack] + [f"{slot[0]}.{slot[1]}"]
            raise CycleError(path)
        if ref.attr not in source.attributes:
            raise MissingAttributeError(source.name, ref.attr)
        stack.append(slot)
        on_path.add(slot)
    return value


def check_acyclic(state) -> list[tuple[str, str]]:
    """Return one valid reduction order over the flow slots.

    The order is a topological sort of the metadata flow subgraph at
    (element, attribute) granularity; ties break by element insertion order,
    then attribute name. Raises CycleError when no order exists. Sources that
    do not resolve here are treated as leaves and reported at read time.
    """
    element_order = {name: position for position, name in enumerate(state.elements)}
    slots: list[tuple[str, str]] = []
    for el in state.elements.values():
        for key, value in el.attributes.items():
            if isinstance(value, FlowRef):
                slots.append((el.name, key))
    slot_set = set(slots)
    dependents: dict[tuple[str, str], list[tuple[str, str]]] = {slot: [] for slot in slots}
    indegree: dict[tuple[str, str], int] = {slot: 0 for slot in slots}
    parent: dict[tuple[str, str], tuple[str, str]] = {}
    for slot in slots:
        name, key = slot
        el = state.elements[name]
        ref = el.attributes[key]
        if ref.source == ARGS_SOURCE:
            continue
        try:
            source = resolve_source(state, el, ref)
        except CtxflowError:
            continue
        source_slot = (source.name, ref.attr)
        if source_slot in slot_set and source_slot != slot:
            dependents[source_slot].append(slot)
            indegree[slot] += 1
            parent[slot] = source_slot
    ready = [(element_order[name], key, (name, key)) for (name, key) in slots if indegree[(name, key)] == 0]
    heapq.heapify(ready)
    order: list[tuple[str, str]] = []
    while ready:
        _, _, slot = heapq.heappop(ready)
        order.append(slot)
        for dependent in dependents[slot]:
            indegree[dependent] -= 1
            if indegree[dependent] == 0:
                heapq.heappush(ready, (element_order[dependent[0]], dependent[1], dependent))
    if len(order) < len(slots):
        remaining = [slot for slot in slots if indegree[slot] > 0]
        raise CycleError(_cycle_path(remaining[0], parent))
    return order


def _cycle_path(start: tuple[str, str], parent: dict) -> list[str]:
    # A slot has exactly one source slot, so walking parents from any node
    # left over by the topological sort must revisit a slot.
    walk = [start]
    positions = {start: 0}
    node = start
    while True:
        node = parent[node]
        if node in positions:
            cycle = walk[positions[node]:] + [node]
            return [f"{name}.{attr}" for name, attr in cycle]
        positions[node] = len(walk)
        walk.append(node)


def reduce_all(state, args: dict[str, str] | None = None) -> None:
    """Reduce every flow, eagerly, in a valid serialization order.

    Afterwards every attribute is a literal and the provenance log carries
    one REDUCE event per flow that existed. A no-op on a reduced state.
    """
    for name, key in check_acyclic(state):
        if isinstance(state.elements[name].attributes.get(key), FlowRef):
            read_attribute(state, name, key, args)


def eval_checks(state, args: dict[str, str] | None = None) -> None:
    """Evaluate every registered equality check; failure raises, success is
    silent. Both sides read through the normal reduction path."""
    for check in list(state.checks):
        actual = read_attribute(state, check.element, check.key, args)
        expected = check.expected
        if isinstance(expected, FlowRef):
            if expected.source == ARGS_SOURCE:
                if args is None or expected.attr not in args:
                    raise MissingArgError(expected.attr)
                expected = args[expected.attr]
            else:
                target = state.elements[check.element]
                source = resolve_source(state, target, expected)
                expected = read_attribute(state, source.name, expected.attr, args)
        if actual != expected:
            raise CheckFailedError(f"{check.element}.{check.key}", expected, actual)


def provenance(state):
    """The full ordered event log, reductions and shadowing interleaved."""
    return list(state.provenance)
