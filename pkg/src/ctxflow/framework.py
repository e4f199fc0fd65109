"""Framework-message execution: dependency ordering, dispatch, handlers.

The framework issues each task of each group as a message to every element
in dependency order; an element responds only if a handler is bound to that
task. ``preGroup`` runs once, ``onGroup`` once per job. Between onGroup
iterations the flows reduced during the iteration are restored from their
definitions so each job reduces fresh; after the last iteration the state
stays fully reduced.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field

from .errors import CtxflowError, DependencyCycleError, HandlerError, KvSourceError
from .model import FlowRef, WorkflowElement
from .reduction import read_attribute, reduce_all

PRE_GROUP = "preGroup"
ON_GROUP = "onGroup"
JOB_INDEX_KEY = "jobIndex"
FRAMEWORK_ORIGIN = "framework"


@dataclass
class DispatchMessage:
    iteration: int
    task: str
    element: str
    handled: bool


@dataclass
class JobRecord:
    """One configured job: an element's reduced attributes at an iteration."""

    iteration: int
    element: str
    attributes: dict[str, str]
    submitted: bool = False


@dataclass
class DispatchTrace:
    """Everything a framework run produced, in order.

    `messages` records every message sent; `jobs` the records stored by
    makeJob; `manifest` the records submitted; `snapshots` the per-iteration
    reduced attributes of the application elements, keyed by job index.
    """

    messages: list[DispatchMessage] = field(default_factory=list)
    jobs: list[JobRecord] = field(default_factory=list)
    manifest: list[JobRecord] = field(default_factory=list)
    snapshots: dict[int, dict[str, dict[str, str]]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.messages)


@dataclass
class HandlerContext:
    """What a handler sees when invoked for one (element, task) message."""

    state: object
    element: WorkflowElement
    task: str
    iteration: int
    args: dict[str, str]
    trace: DispatchTrace


def dependency_order(state) -> list[WorkflowElement]:
    """Stable topological order of all elements.

    Elements appear after everything they depend on; among unordered
    elements, insertion order is preserved. Pattern dependencies match every
    attached element except the dependent itself.
    """
    elements = list(state.elements.values())
    position = {el.name: i for i, el in enumerate(elements)}
    dependents: dict[str, list[str]] = defaultdict(list)
    indegree = {el.name: 0 for el in elements}
    for el in elements:
        for dep in el.dependencies:
            if isinstance(dep, str):
                sources = [dep] if dep in state.elements else []
                if dep == el.name:
                    raise DependencyCycleError([el.name, el.name])
            else:
                sources = [c.name for c in elements if c.name != el.name and dep.matches(c.description)]
            for source in sources:
                dependents[source].append(el.name)
                indegree[el.name] += 1
    ready = [position[name] for name, degree in indegree.items() if degree == 0]
    heapq.heapify(ready)
    order: list[WorkflowElement] = []
    while ready:
        el = elements[heapq.heappop(ready)]
        order.append(el)
        for name in dependents[el.name]:
            indegree[name] -= 1
            if indegree[name] == 0:
                heapq.heappush(ready, position[name])
    if len(order) < len(elements):
        remaining = {name for name, degree in indegree.items() if degree > 0}
        raise DependencyCycleError(_dependency_cycle(remaining, dependents))
    return order


def _dependency_cycle(remaining: set[str], dependents: dict[str, list[str]]) -> list[str]:
    # DFS over the leftover subgraph until a node repeats on the path.
    start = next(iter(remaining))
    path: list[str] = []
    on_path: dict[str, int] = {}
    stack: list[tuple[str, int]] = [(start, 0)]
    while stack:
        node, child = stack[-1]
        if child == 0:
            on_path[node] = len(path)
            path.append(node)
        successors = [d for d in dependents[node] if d in remaining]
        if child < len(successors):
            stack[-1] = (node, child + 1)
            nxt = successors[child]
            if nxt in on_path:
                return path[on_path[nxt]:] + [nxt]
            stack.append((nxt, 0))
        else:
            stack.pop()
            path.pop()
            del on_path[node]
    return [start, start]


def run_framework(state, n_jobs: int = 1, args: dict[str, str] | None = None) -> DispatchTrace:
    """Execute the framework schedule and return the dispatch trace.

    Groups run in definition order; within a group, tasks in list order;
    within a task, every element is messaged in dependency order. A handler
    failure aborts the run.
    """
    if not state.framework_groups:
        raise CtxflowError("no framework groups defined")
    args = dict(args or {})
    order = dependency_order(state)
    trace = DispatchTrace()
    for group, tasks in state.framework_groups.items():
        if group == ON_GROUP:
            _run_on_group(state, tasks, n_jobs, args, trace, order)
        else:
            _dispatch_iteration(state, tasks, 0, args, trace, order)
    return trace


def run_pregroup(state, args: dict[str, str] | None = None) -> DispatchTrace:
    """Dispatch only the preGroup tasks (no-op when none are defined)."""
    trace = DispatchTrace()
    tasks = state.framework_groups.get(PRE_GROUP)
    if tasks:
        _dispatch_iteration(state, tasks, 0, dict(args or {}), trace, dependency_order(state))
    return trace


def _dispatch_iteration(state, tasks, iteration, args, trace, order) -> None:
    for task in tasks:
        for el in order:
            handler_name = el.handlers.get(task)
            handled = handler_name is not None
            if handled:
                handler = state.handler_library[handler_name]
                try:
                    handler(HandlerContext(state, el, task, iteration, args, trace))
                except Exception as exc:
                    raise HandlerError(el.name, task, exc) from exc
            trace.messages.append(DispatchMessage(iteration, task, el.name, handled))


def _run_on_group(state, tasks, n_jobs, args, trace, order) -> None:
    flow_snapshot = _snapshot_flows(state)
    for iteration in range(n_jobs):
        for el in state.elements.values():
            state.set_attribute(el, JOB_INDEX_KEY, str(iteration), origin=FRAMEWORK_ORIGIN, record=False)
        _dispatch_iteration(state, tasks, iteration, args, trace, order)
        # Remaining flows reduce now so the iteration snapshot is literal-only.
        reduce_all(state, args)
        trace.snapshots[iteration] = {
            el.name: dict(el.attributes) for el in state.elements.values() if not el.is_terminal
        }
        if iteration < n_jobs - 1:
            _restore_flows(state, flow_snapshot)


def _snapshot_flows(state):
    snapshot = []
    for el in state.elements.values():
        for key, value in el.attributes.items():
            if isinstance(value, FlowRef):
                snapshot.append((el.name, key, value, el.attr_origins.get(key)))
    return snapshot


def _restore_flows(state, snapshot) -> None:
    for name, key, ref, origin in snapshot:
        state.set_attribute(name, key, ref, origin=origin, record=False)


# -- built-in handler library ----------------------------------------------


def connect_to_database(ctx: HandlerContext) -> None:
    """Load the element's backing key/value sources into its attributes."""
    el = ctx.element
    matched = [s for s in ctx.state.kv_sources if s.description.subsumes(el.description)]
    if not matched:
        raise KvSourceError(f"no kv source registered for element {el.name} ({el.description})")
    for source in matched:
        for key, value in source.load().items():
            ctx.state.set_attribute(el, key, value, origin=source.origin())


def configure_job(ctx: HandlerContext) -> None:
    """Eagerly reduce every flow targeting this element."""
    el = ctx.element
    for key in [k for k, v in el.attributes.items() if isinstance(v, FlowRef)]:
        read_attribute(ctx.state, el.name, key, ctx.args)


def make_job(ctx: HandlerContext) -> None:
    """Store a job record of this element's reduced attributes."""
    ctx.trace.jobs.append(_job_record(ctx))


def submit(ctx: HandlerContext) -> None:
    """Submit this iteration's stored jobs; with none stored, submit a record
    built from the handling element itself."""
    pending = [j for j in ctx.trace.jobs if j.iteration == ctx.iteration and not j.submitted]
    if not pending:
        record = _job_record(ctx)
        record.submitted = True
        ctx.trace.manifest.append(record)
        return
    for job in pending:
        job.submitted = True
        ctx.trace.manifest.append(job)


def _job_record(ctx: HandlerContext) -> JobRecord:
    el = ctx.element
    attrs = {key: read_attribute(ctx.state, el.name, key, ctx.args) for key in list(el.attributes)}
    return JobRecord(ctx.iteration, el.name, attrs)


def builtin_handlers() -> dict:
    return {
        "connectToDatabase": connect_to_database,
        "configureJob": configure_job,
        "makeJob": make_job,
        "submit": submit,
    }
