"""`aku` command line: evaluate, discover, what-if, execute, tasks, evidence.

Operates directly on a bundle file (AKU_BUNDLE or --bundle); mutating
commands save the bundle back on success. `--json` prints the same data
object the HTTP gateway would return, byte for byte. Exit codes: 0
applicable/success, 1 usage error, 2 internal error, 3 inapplicable,
4 undetermined.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

from .. import codec
from ..actions import EvidenceUnit
from ..conditions import parse_literal
from ..engine import what_if
from ..errors import AkuError
from ..orchestration import Orchestrator
from ..units import Assertion, UnitStore
from ..values import now_rfc3339, split_path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2
EXIT_INAPPLICABLE = 3
EXIT_UNDETERMINED = 4

_VERDICT_EXIT = {"applicable": EXIT_OK, "inapplicable": EXIT_INAPPLICABLE, "undetermined": EXIT_UNDETERMINED}
_MARKERS = {"SAT": "[SAT]    ", "UNSAT": "[UNSAT]  ", "UNKNOWN": "[UNKNOWN]"}


def _build_parser() -> argparse.ArgumentParser:
    # --bundle/--json are accepted both before and after the subcommand
    # (SUPPRESS keeps a subcommand from clobbering a value given up front)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bundle", default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="aku", description=__doc__)
    parser.add_argument("--bundle", default=os.environ.get("AKU_BUNDLE", "bundle.json"))
    parser.add_argument("--json", action="store_true", help="emit the gateway data object")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("load", help="load the bundle and print a summary", parents=[common])

    p_put = sub.add_parser("put", help="add units from a JSON file to the bundle", parents=[common])
    p_put.add_argument("file")

    p_eval = sub.add_parser("eval", help="evaluate an action unit against a context", parents=[common])
    p_eval.add_argument("action_unit")
    p_eval.add_argument("context")

    p_disc = sub.add_parser(
        "discover", help="forward (--context) or reverse (--action) discovery", parents=[common]
    )
    group = p_disc.add_mutually_exclusive_group(required=True)
    group.add_argument("--context")
    group.add_argument("--action")
    p_disc.add_argument("--class", dest="objective_class")
    p_disc.add_argument("--tags", default="")
    p_disc.add_argument("--include-inapplicable", action="store_true")

    p_what = sub.add_parser("whatif", help="counterfactual overlay evaluation", parents=[common])
    p_what.add_argument("action_unit")
    p_what.add_argument("context")
    p_what.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SUBJECT.ATTR=LITERAL",
        help='override, e.g. --set "site.salinity_psu=28 psu"',
    )

    p_exec = sub.add_parser("execute", help="execute an action unit against a context", parents=[common])
    p_exec.add_argument("action_unit")
    p_exec.add_argument("context")
    p_exec.add_argument("--dry-run", action="store_true")
    p_exec.add_argument("--evidence", action="store_true", help="record evidence on completion")

    p_tasks = sub.add_parser("tasks", help="list or complete manual tasks")
    tasks_sub = p_tasks.add_subparsers(dest="tasks_command", required=True)
    p_tlist = tasks_sub.add_parser("list", parents=[common])
    p_tlist.add_argument("--execution")
    p_tdone = tasks_sub.add_parser("complete", parents=[common])
    p_tdone.add_argument("execution")
    p_tdone.add_argument("step")
    p_tdone.add_argument(
        "--output", action="append", default=[], metavar="ROLE=LITERAL", help="step output value"
    )
    p_tdone.add_argument("--outcome", default="success", choices=["success", "failure", "partial"])

    p_ev = sub.add_parser("evidence", help="record evidence units")
    ev_sub = p_ev.add_subparsers(dest="evidence_command", required=True)
    p_eadd = ev_sub.add_parser("add", parents=[common])
    p_eadd.add_argument("action_unit")
    p_eadd.add_argument("context")
    p_eadd.add_argument("--outcome", default="success", choices=["success", "failure", "partial"])
    p_eadd.add_argument("--id", dest="evidence_id")

    p_serve = sub.add_parser("serve", help="run the HTTP gateway", parents=[common])
    p_serve.add_argument("--port", type=int, default=7468)
    p_serve.add_argument("--readonly", action="store_true")

    return parser


def _emit(args, data, human: str) -> None:
    if args.json:
        print(codec.canonical_json(data))
    else:
        print(human)


def _report_table(report_obj: dict) -> str:
    lines = []
    width = max([len(r["label"]) for r in report_obj["per_condition"]] + [9])
    for row in report_obj["per_condition"]:
        lines.append(f"  {_MARKERS[row['value']]} {row['label']:<{width}}  ({row['kind']})")
    lines.append(f"verdict: {report_obj['verdict']}    grade: {report_obj['grade']}")
    if report_obj["gaps"]:
        lines.append("gaps:")
        for gap in report_obj["gaps"]:
            lines.append(f"  - {gap['condition_label']}: {gap['reason']} (needed: {gap['needed']})")
    return "\n".join(lines)


def _parse_named_literal(item: str, what: str) -> tuple[str, str]:
    name, sep, raw = item.partition("=")
    if not sep or not name or not raw:
        raise AkuError(f"bad {what} {item!r}: expected NAME=LITERAL")
    return name.strip(), raw.strip()


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        return _dispatch(args)
    except AkuError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _load_store(args) -> UnitStore:
    return UnitStore.load_bundle(args.bundle)


def _dispatch(args) -> int:
    if args.command == "serve":
        from .http import serve_http

        serve_http(args.bundle, port=args.port, readonly=args.readonly)
        return EXIT_OK

    store = _load_store(args)
    orch = Orchestrator(store)

    if args.command == "load":
        kinds = Counter(getattr(u, "kind", "?") for u in store.units())
        summary = {"units": len(store), "by_kind": dict(sorted(kinds.items()))}
        _emit(args, summary, "\n".join([f"{len(store)} units"] + [f"  {k}: {n}" for k, n in sorted(kinds.items())]))
        return EXIT_OK

    if args.command == "put":
        with open(args.file, encoding="utf-8") as handle:
            body = json.load(handle)
        objs = body if isinstance(body, list) else [body]
        ids = store.put_units([codec.unit_from_obj(o) for o in objs])
        store.save_bundle(args.bundle)
        _emit(args, {"ids": ids}, "\n".join(ids))
        return EXIT_OK

    if args.command == "eval":
        report = orch.evaluate(args.action_unit, args.context)
        obj = codec.report_to_obj(report)
        _emit(args, obj, _report_table(obj))
        return _VERDICT_EXIT[report.verdict]

    if args.command == "discover":
        if args.context:
            candidates = orch.discover_forward(
                args.context,
                objective_class=args.objective_class,
                tags=tuple(t for t in args.tags.split(",") if t),
                include_inapplicable=args.include_inapplicable,
            )
            data = [codec.candidate_to_obj(c) for c in candidates]
            human = "\n".join(
                f"{c.action_unit}  verdict={c.report.verdict} grade={c.report.grade} level={c.level}"
                for c in candidates
            ) or "no candidates"
        else:
            hits = orch.discover_reverse(args.action)
            data = [codec.reverse_hit_to_obj(h) for h in hits]
            human = "\n".join(f"{h.context_id}  verdict={h.verdict} grade={h.grade}" for h in hits) or "no contexts"
        _emit(args, data, human)
        return EXIT_OK

    if args.command == "whatif":
        overrides = []
        for item in args.overrides:
            path, raw = _parse_named_literal(item, "override")
            subject, attribute = split_path(path)
            overrides.append(
                Assertion(
                    subject=subject,
                    attribute=attribute,
                    value=parse_literal(raw),
                    quality="assumed",
                    observed_at=now_rfc3339(),
                    provenance="whatif",
                )
            )
        diff = what_if(store, args.action_unit, args.context, tuple(overrides))
        obj = codec.whatif_to_obj(diff)
        flips = "\n".join(f"  {f['label']}: {f['from']} -> {f['to']}" for f in obj["flips"]) or "  (none)"
        human = (
            f"before: {obj['before']['verdict']} / after: {obj['after']['verdict']}\nflips:\n{flips}"
        )
        _emit(args, obj, human)
        return EXIT_OK

    if args.command == "execute":
        record = orch.execute(
            args.action_unit, args.context, dry_run=args.dry_run, evidence_on_completion=args.evidence
        )
        if not args.dry_run:
            store.save_bundle(args.bundle)
        obj = codec.execution_to_obj(record)
        steps = "\n".join(
            f"  {s['step_id']}: {s['outcome']} ({s['executor']})" for s in obj.get("steps", [])
        )
        _emit(args, obj, f"execution {record.id}: {record.status}\n{steps}")
        return EXIT_OK

    if args.command == "tasks":
        if args.tasks_command == "list":
            tasks = orch.open_tasks(args.execution)
            data = [codec.task_to_obj(t) for t in tasks]
            human = "\n".join(f"{t.execution_id} {t.step_id}: {t.directive_text}" for t in tasks) or "no open tasks"
            _emit(args, data, human)
            return EXIT_OK
        outputs = {}
        for item in args.output:
            role, raw = _parse_named_literal(item, "output")
            outputs[role] = parse_literal(raw)
        record = orch.complete_manual_task(args.execution, args.step, outputs, outcome=args.outcome)
        store.save_bundle(args.bundle)
        obj = codec.execution_to_obj(record)
        _emit(args, obj, f"execution {record.id}: {record.status}")
        return EXIT_OK

    if args.command == "evidence":
        import uuid

        evidence = EvidenceUnit(
            id=args.evidence_id or f"ev:{uuid.uuid4().hex[:12]}",
            label=f"evidence for {args.action_unit}",
            action_unit=args.action_unit,
            context=args.context,
            outcome=args.outcome,
            recorded_at=now_rfc3339(),
        )
        orch.record_evidence(evidence)
        store.save_bundle(args.bundle)
        _emit(args, {"id": evidence.id}, evidence.id)
        return EXIT_OK

    raise AkuError(f"unknown command {args.command!r}")


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
