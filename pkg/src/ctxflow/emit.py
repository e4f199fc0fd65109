"""Emitters: canonical macro, DAG description, shell scripts, provenance,
and the submission manifest. All emitters are pure functions of their inputs
and byte-stable across runs."""

from __future__ import annotations

from . import macro
from .errors import NotReducedError
from .framework import DispatchTrace, dependency_order
from .model import ReductionEvent


def emit_macro(state) -> str:
    """Replay the state as a canonical macro document; unreduced flows render
    as ``::`` references, reduced attributes as literals."""
    return macro.serialize(state)


def emit_dag(state) -> str:
    """A DAG description of the application elements.

    One ``JOB <name> <name>.sub`` line per application element in dependency
    order, then one ``PARENT <a> CHILD <b>`` line per sequencing arrow.
    Terminals are excluded; they carry metadata, not work.
    """
    applications = [el for el in dependency_order(state) if not el.is_terminal]
    application_names = {el.name for el in applications}
    lines = [f"JOB {el.name} {el.name}.sub" for el in applications]
    for el in applications:
        parents: list[str] = []
        for dep in el.dependencies:
            if isinstance(dep, str):
                candidates = [dep]
            else:
                candidates = [
                    c.name for c in state.elements.values() if c.name != el.name and dep.matches(c.description)
                ]
            for name in candidates:
                if name in application_names and name not in parents:
                    parents.append(name)
        lines.extend(f"PARENT {parent} CHILD {el.name}" for parent in parents)
    return "".join(line + "\n" for line in lines)


def emit_shell(state, trace: DispatchTrace) -> list[tuple[str, str]]:
    """One shell script per application element per job iteration.

    Scripts are named ``<jobIndex>_<element>.sh`` and contain one
    ``export KEY=VALUE`` line per attribute (sorted by key) followed by a
    placeholder invocation. Requires a fully reduced state.
    """
    if state.flow_count() > 0:
        raise NotReducedError(f"{state.flow_count()} flows remain; reduce before emitting scripts")
    applications = [el for el in dependency_order(state) if not el.is_terminal]
    scripts: list[tuple[str, str]] = []
    for iteration in sorted(trace.snapshots):
        snapshot = trace.snapshots[iteration]
        for el in applications:
            attrs = snapshot.get(el.name, {})
            lines = ["#!/bin/sh"]
            lines.extend(f"export {key}={attrs[key]}" for key in sorted(attrs))
            lines.append(f"echo run {el.name}")
            scripts.append((f"{iteration}_{el.name}.sh", "".join(line + "\n" for line in lines)))
    return scripts


def emit_provenance(state) -> str:
    """One line per provenance event, in sequence order."""
    lines = []
    for event in state.provenance:
        if event.kind == ReductionEvent.REDUCE:
            lines.append(
                f"REDUCE {event.element}.{event.attribute} <- {event.source}.{event.source_attr}"
                f" = {event.value} ctx={event.doc}"
            )
        else:
            lines.append(f"SHADOW {event.element}.{event.attribute} {event.old_doc} -> {event.new_doc}")
    return "".join(line + "\n" for line in lines)


def emit_manifest(trace: DispatchTrace) -> str:
    """One line per submitted job record."""
    lines = []
    for job in trace.manifest:
        attrs = ",".join(f"{key}={job.attributes[key]}" for key in sorted(job.attributes))
        lines.append(f"JOB {job.iteration} {job.element} {attrs}")
    return "".join(line + "\n" for line in lines)
