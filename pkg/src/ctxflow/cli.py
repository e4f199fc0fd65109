"""Command-line driver: parse, load contexts, attach, reduce, run, emit.

Exit codes: 0 success, 1 syntax or semantic error, 2 cycle, 3 collision in
strict mode. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import macro
from .emit import emit_dag, emit_macro, emit_manifest, emit_provenance, emit_shell
from .errors import CtxflowError, CycleError, DependencyCycleError
from .framework import DispatchTrace, run_framework, run_pregroup
from .linker import Linker
from .model import Description
from .reduction import check_acyclic, eval_checks, reduce_all
from .sources import KvSource

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CYCLE = 2
EXIT_COLLISION = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctxflow", description="context-driven workflow configuration")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("workflow", help="workflow document (.mac)")
    common.add_argument("-c", "--context", action="append", default=[], metavar="CTX",
                        help="context document, loaded in the order given (repeatable)")
    common.add_argument("--strict-collisions", action="store_true",
                        help="treat any metadata collision as a hard error")
    values = argparse.ArgumentParser(add_help=False)
    values.add_argument("--db", action="append", default=[], metavar="DESC:FILE",
                        help="kv source, e.g. Database=RefDB:refdb.kv (repeatable)")
    values.add_argument("--arg", action="append", default=[], metavar="K=V",
                        help="binding for @args flows (repeatable)")

    sub = parser.add_subparsers(dest="command", required=True)

    p_apply = sub.add_parser("apply", parents=[common], help="load contexts and expand the workflow")
    p_apply.add_argument("--emit", choices=["macro", "dag"], default="macro")
    p_apply.add_argument("-o", "--output", metavar="PATH", help="output file (default stdout)")

    p_reduce = sub.add_parser("reduce", parents=[common, values],
                              help="expand, connect sources, and reduce every flow")
    p_reduce.add_argument("--emit", choices=["macro", "shell", "provenance"], default="macro")
    p_reduce.add_argument("-o", "--output", metavar="PATH", help="output file (default stdout)")
    p_reduce.add_argument("--out-dir", metavar="DIR", help="directory for shell scripts")

    p_run = sub.add_parser("run", parents=[common, values], help="full framework run; write job outputs")
    p_run.add_argument("--jobs", type=int, default=1, metavar="N", help="onGroup iterations (default 1)")
    p_run.add_argument("--out-dir", required=True, metavar="DIR")

    sub.add_parser("validate", parents=[common], help="check cycles and collisions without emitting")
    return parser


def _load_state(ns) -> Linker:
    state = Linker()
    for path in ns.context:
        text = Path(path).read_text(encoding="utf-8")
        state.load_context(macro.parse_context(text, Path(path).name))
    for spec in getattr(ns, "db", []):
        desc_text, sep, kv_path = spec.partition(":")
        if not sep:
            raise CtxflowError(f"--db expects DESC:FILE, got {spec!r}")
        state.add_kv_source(KvSource(Description.parse(desc_text), Path(kv_path)))
    statements = macro.parse_workflow(Path(ns.workflow).read_text(encoding="utf-8"))
    state.run_statements(statements)
    return state


def _args_binding(ns) -> dict[str, str]:
    binding: dict[str, str] = {}
    for item in getattr(ns, "arg", []):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise CtxflowError(f"--arg expects K=V, got {item!r}")
        binding[key] = value
    return binding


def _collision_gate(ns, state: Linker) -> bool:
    collisions = state.detect_collisions()
    if ns.strict_collisions and collisions:
        for record in collisions:
            print(
                f"collision: {record.element}.{record.attribute}: "
                f"{record.old_doc} ({record.old_value}) shadowed by {record.new_doc} ({record.new_value})",
                file=sys.stderr,
            )
        return False
    return True


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_apply(ns) -> int:
    state = _load_state(ns)
    if not _collision_gate(ns, state):
        return EXIT_COLLISION
    _write(emit_macro(state) if ns.emit == "macro" else emit_dag(state), ns.output)
    return EXIT_OK


def _cmd_reduce(ns) -> int:
    state = _load_state(ns)
    if not _collision_gate(ns, state):
        return EXIT_COLLISION
    args = _args_binding(ns)
    run_pregroup(state, args)
    reduce_all(state, args)
    eval_checks(state, args)
    if ns.emit == "shell":
        # No job iterations ran; emit one script set from the reduced state.
        trace = DispatchTrace()
        trace.snapshots[0] = {
            el.name: dict(el.attributes) for el in state.elements.values() if not el.is_terminal
        }
        out_dir = Path(ns.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in emit_shell(state, trace):
            (out_dir / name).write_text(text, encoding="utf-8")
        return EXIT_OK
    _write(emit_macro(state) if ns.emit == "macro" else emit_provenance(state), ns.output)
    return EXIT_OK


def _cmd_run(ns) -> int:
    if ns.jobs < 1:
        raise CtxflowError("--jobs must be at least 1")
    state = _load_state(ns)
    if not _collision_gate(ns, state):
        return EXIT_COLLISION
    args = _args_binding(ns)
    trace = run_framework(state, n_jobs=ns.jobs, args=args)
    eval_checks(state, args)
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in emit_shell(state, trace):
        (out_dir / name).write_text(text, encoding="utf-8")
    (out_dir / "manifest.log").write_text(emit_manifest(trace), encoding="utf-8")
    (out_dir / "provenance.log").write_text(emit_provenance(state), encoding="utf-8")
    return EXIT_OK


def _cmd_validate(ns) -> int:
    state = _load_state(ns)
    check_acyclic(state)
    from .framework import dependency_order

    dependency_order(state)
    collisions = state.detect_collisions()
    if not _collision_gate(ns, state):
        return EXIT_COLLISION
    print(f"ok: {len(state.elements)} elements, {state.flow_count()} flows, {len(collisions)} collisions")
    return EXIT_OK


_COMMANDS = {"apply": _cmd_apply, "reduce": _cmd_reduce, "run": _cmd_run, "validate": _cmd_validate}


def cli_main(argv: list[str] | None = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for cycles
        code = exc.code if isinstance(exc.code, int) else 1
        return EXIT_ERROR if code else EXIT_OK
    try:
        return _COMMANDS[ns.command](ns)
    except (CycleError, DependencyCycleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CYCLE
    except (CtxflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
