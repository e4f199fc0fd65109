"""Shared fixture corpus loaders and state-comparison helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

import ctxflow as cf

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CONTEXTS = ["Framework.ctx", "PhysicsGroup.ctx", "Scheduler.ctx"]
REDUCE_CONTEXTS = CONTEXTS + ["Outputs.ctx"]
ARGS = {"UserJDLFile": "job.jdl", "ResourceBroker": "rb.example.org"}

GOLDEN = FIXTURES / "full_workflow.golden.mac"
WORKFLOW = FIXTURES / "workflow.mac"


def load_fixture_state(contexts=CONTEXTS, workflow=True, kv=False) -> cf.Linker:
    state = cf.Linker()
    for name in contexts:
        text = (FIXTURES / name).read_text(encoding="utf-8")
        state.load_context(cf.parse_context(text, name))
    if kv:
        state.add_kv_source(cf.KvSource(cf.Description({"Database": "RefDB"}), FIXTURES / "RefDB.kv"))
        state.add_kv_source(
            cf.KvSource(cf.Description({"Database": "PhysicsGroupDB"}), FIXTURES / "PhysicsGroupDB.kv")
        )
    if workflow:
        state.run_statements(cf.parse_workflow(WORKFLOW.read_text(encoding="utf-8")))
    return state


def load_reduce_ready_state() -> cf.Linker:
    """Fixture state with output literals and kv sources, ready to reduce."""
    return load_fixture_state(contexts=REDUCE_CONTEXTS, kv=True)


def element_signature(el: cf.WorkflowElement):
    # Dependency entries are compared as a set: the recorded order follows
    # event time, which legitimately differs between load-then-attach and
    # attach-then-load, while the dependency relation itself must not.
    dependencies = sorted(d if isinstance(d, str) else d.canonical() for d in el.dependencies)
    return (
        el.name,
        el.is_terminal,
        dict(el.description.entries),
        dict(el.attributes),
        dependencies,
        dict(el.handlers),
    )


def states_equivalent(a: cf.Linker, b: cf.Linker) -> bool:
    """Element-wise equality: same elements with same descriptions,
    attributes, dependencies and handlers (ignoring insertion order)."""
    left = {name: element_signature(el) for name, el in a.elements.items()}
    right = {name: element_signature(el) for name, el in b.elements.items()}
    return left == right


def scan_flow_count(state: cf.Linker) -> int:
    """Independent flow counter: scan every attribute for FlowRefs."""
    return sum(
        1
        for el in state.elements.values()
        for value in el.attributes.values()
        if isinstance(value, cf.FlowRef)
    )


@pytest.fixture
def fixture_state() -> cf.Linker:
    return load_fixture_state()


@pytest.fixture
def reduce_ready_state() -> cf.Linker:
    return load_reduce_ready_state()
