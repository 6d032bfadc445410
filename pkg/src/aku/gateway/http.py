"""HTTP gateway: the sole surface the workbench and scripts consume.

Every response is an envelope `{ok, data}` or `{ok, error: {code, message,
detail}}`, serialized with the canonical JSON writer so the CLI's --json
output is byte-identical to the HTTP data objects. Mutations funnel through
the store's single-writer lock and are persisted back to the bundle file
unless the service runs readonly.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Query, Request, Response

from .. import codec
from ..actions import EvidenceUnit
from ..conversions import ConversionRegistry
from ..errors import AkuError, NotFound, ReadOnlyMode
from ..orchestration import ExecutionRecord, ExecutorRegistry, Orchestrator
from ..schemas import compatible_action_units
from ..units import UnitStore
from ..values import now_rfc3339

_HTTP_STATUS = {"not_found": 404, "conflict": 409, "invalid": 400, "blocked": 409, "internal": 500}


class AppState:
    def __init__(
        self,
        store: UnitStore,
        registry: ExecutorRegistry | None = None,
        conversions: ConversionRegistry | None = None,
        bundle_path: str | None = None,
        readonly: bool = False,
        promotion_threshold: int = 1,
    ):
        self.store = store
        self.orchestrator = Orchestrator(
            store, registry, conversions, promotion_threshold=promotion_threshold
        )
        self.conversions = conversions
        self.bundle_path = bundle_path
        self.readonly = readonly
        self._save_lock = threading.Lock()

    def guard_mutation(self):
        if self.readonly:
            raise ReadOnlyMode("service is running readonly; mutations are rejected")

    def persist(self):
        if self.bundle_path and not self.readonly:
            with self._save_lock:
                codec.save_bundle(self.store, self.bundle_path)


def _require(body: dict, key: str):
    try:
        return body[key]
    except (TypeError, KeyError):
        raise AkuError(f"request body is missing {key!r}")


def _ok(data, status_code: int = 200) -> Response:
    body = codec.canonical_json({"ok": True, "data": data})
    return Response(content=body, media_type="application/json", status_code=status_code)


def _err(code: str, message: str, detail=None, status_code: int | None = None) -> Response:
    error = {"code": code, "message": message}
    if detail is not None:
        error["detail"] = detail
    body = codec.canonical_json({"ok": False, "error": error})
    return Response(
        content=body,
        media_type="application/json",
        status_code=status_code or _HTTP_STATUS.get(code, 400),
    )


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="aku gateway", docs_url=None, redoc_url=None)
    orch = state.orchestrator

    @app.exception_handler(AkuError)
    async def _handle_aku_error(_request: Request, exc: AkuError):
        return _err(exc.code, exc.message, exc.detail)

    @app.exception_handler(Exception)
    async def _handle_unexpected(_request: Request, exc: Exception):
        return _err("internal", f"{type(exc).__name__}: {exc}", status_code=500)

    # ---- units ------------------------------------------------------------

    @app.get("/units")
    async def list_units(
        kind: str | None = None,
        statement_class: str | None = Query(None, alias="class"),
        frame: str | None = None,
    ):
        return _ok(state.store.list_units(kind=kind, statement_class=statement_class, frame=frame))

    @app.get("/units/{unit_id}")
    async def get_unit(unit_id: str):
        return _ok(codec.unit_to_obj(state.store.get_unit(unit_id)))

    @app.post("/units")
    async def post_unit(request: Request):
        state.guard_mutation()
        body = await request.json()
        units = body if isinstance(body, list) else [body]
        ids = state.store.put_units([codec.unit_from_obj(u) for u in units])
        state.persist()
        return _ok({"ids": ids})

    @app.post("/contexts/{context_id}/assertions")
    async def post_assertion(context_id: str, request: Request):
        state.guard_mutation()
        body = await request.json()
        assertion = codec.assertion_from_obj(body)
        state.store.add_assertion(context_id, assertion)
        state.persist()
        return _ok({"id": context_id})

    # ---- evaluation ---------------------------------------------------------

    @app.post("/evaluate")
    async def evaluate(request: Request):
        body = await request.json()
        report = orch.evaluate(_require(body, "action_unit"), _require(body, "context"))
        return _ok(codec.report_to_obj(report))

    @app.post("/whatif")
    async def whatif(request: Request):
        body = await request.json()
        overrides = tuple(codec.assertion_from_obj(o) for o in body.get("overrides", ()))
        from ..engine import what_if

        diff = what_if(
            state.store,
            _require(body, "action_unit"),
            _require(body, "context"),
            overrides,
            conversions=state.conversions,
            promotion_threshold=orch.promotion_threshold,
        )
        return _ok(codec.whatif_to_obj(diff))

    # ---- discovery -----------------------------------------------------------

    @app.get("/discover/forward")
    async def discover_forward(
        context: str,
        objective_class: str | None = None,
        tags: str | None = None,
        include_inapplicable: bool = False,
    ):
        tag_tuple = tuple(t for t in (tags or "").split(",") if t)
        candidates = orch.discover_forward(
            context,
            objective_class=objective_class,
            tags=tag_tuple,
            include_inapplicable=include_inapplicable,
        )
        return _ok([codec.candidate_to_obj(c) for c in candidates])

    @app.get("/discover/reverse")
    async def discover_reverse(action_unit: str):
        hits = orch.discover_reverse(action_unit)
        return _ok([codec.reverse_hit_to_obj(h) for h in hits])

    @app.get("/affordances")
    async def affordances(schema: str):
        return _ok(compatible_action_units(state.store, schema))

    # ---- execution -------------------------------------------------------------

    @app.post("/execute")
    async def execute(request: Request):
        body = await request.json()
        dry_run = bool(body.get("dry_run", False))
        if not dry_run:
            state.guard_mutation()
        record = orch.execute(
            _require(body, "action_unit"),
            _require(body, "context"),
            dry_run=dry_run,
            evidence_on_completion=bool(body.get("evidence_on_completion", False)),
        )
        if not dry_run:
            state.persist()
        return _ok(codec.execution_to_obj(record))

    @app.get("/executions/{execution_id}")
    async def get_execution(execution_id: str):
        record = state.store.get_unit(execution_id)
        if not isinstance(record, ExecutionRecord):
            raise NotFound(f"unit {execution_id!r} is not an execution")
        return _ok(codec.execution_to_obj(record))

    @app.get("/tasks")
    async def list_tasks(execution: str | None = None):
        return _ok([codec.task_to_obj(t) for t in orch.open_tasks(execution)])

    @app.post("/tasks/{execution_id}/{step_id}/complete")
    async def complete_task(execution_id: str, step_id: str, request: Request):
        state.guard_mutation()
        body = await request.json()
        outputs = {
            role: codec.slot_value_from_obj(value)
            for role, value in (body.get("outputs") or {}).items()
        }
        record = orch.complete_manual_task(
            execution_id, step_id, outputs, outcome=body.get("outcome", "success")
        )
        state.persist()
        return _ok(codec.execution_to_obj(record))

    # ---- evidence ----------------------------------------------------------------

    @app.post("/evidence")
    async def post_evidence(request: Request):
        state.guard_mutation()
        body = await request.json()
        body.setdefault("kind", "evidence")
        if not body.get("id"):
            import uuid

            body["id"] = f"ev:{uuid.uuid4().hex[:12]}"
        body.setdefault("recorded_at", now_rfc3339())
        evidence = codec.unit_from_obj(body)
        if not isinstance(evidence, EvidenceUnit):
            raise NotFound("body is not an evidence unit")
        orch.record_evidence(evidence)
        state.persist()
        return _ok({"id": evidence.id})

    return app


def serve_http(
    bundle_path: str,
    port: int = 7468,
    readonly: bool = False,
    registry: ExecutorRegistry | None = None,
) -> None:
    """Load the bundle and serve until interrupted."""
    import uvicorn

    store = UnitStore.load_bundle(bundle_path)
    state = AppState(store, registry=registry, bundle_path=bundle_path, readonly=readonly)
    uvicorn.run(create_app(state), host="127.0.0.1", port=port, log_level="warning")
