from __future__ import annotations

import json

from aku.gateway.cli import (
    EXIT_INAPPLICABLE,
    EXIT_OK,
    EXIT_UNDETERMINED,
    EXIT_USAGE,
    run_cli,
)
from aku.units import UnitStore


def run(capsys, bundle_path, *argv):
    code = run_cli(["--bundle", str(bundle_path), *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, bundle_path, *argv):
    code = run_cli(["--bundle", str(bundle_path), "--json", *argv])
    captured = capsys.readouterr()
    return code, captured.out


def test_eval_exit_codes_per_verdict(capsys, bundle_path):
    code, out, _ = run(capsys, bundle_path, "eval", "ex:mangrove", "ex:site-A")
    assert code == EXIT_OK
    assert "verdict: applicable" in out
    code, out, _ = run(capsys, bundle_path, "eval", "ex:mangrove", "ex:site-B")
    assert code == EXIT_INAPPLICABLE
    code, out, _ = run(capsys, bundle_path, "eval", "ex:mangrove", "ex:site-C")
    assert code == EXIT_UNDETERMINED
    assert "site.salinity_psu" in out  # the gap line names the needed path


def test_eval_missing_unit_is_usage_error(capsys, bundle_path):
    code, _, err = run(capsys, bundle_path, "eval", "ex:missing", "ex:site-A")
    assert code == EXIT_USAGE
    assert "ex:missing" in err


def test_human_table_markers(capsys, bundle_path):
    _, out, _ = run(capsys, bundle_path, "eval", "ex:mangrove", "ex:site-C")
    assert "[SAT]" in out and "[UNKNOWN]" in out
    assert "gaps:" in out


def test_load_summary(capsys, bundle_path):
    code, out, _ = run(capsys, bundle_path, "load")
    assert code == EXIT_OK
    assert "units" in out


def test_missing_bundle_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, tmp_path / "absent.json", "load")
    assert code == EXIT_USAGE


def test_discover_forward_and_reverse(capsys, bundle_path):
    code, out, _ = run(capsys, bundle_path, "discover", "--context", "ex:site-A", "--tags", "restoration")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("ex:mangrove")
    code, out, _ = run(capsys, bundle_path, "discover", "--action", "ex:mangrove")
    assert "ex:site-B  verdict=inapplicable" in out


def test_whatif_cli(capsys, bundle_path):
    code, out, _ = run(
        capsys, bundle_path, "whatif", "ex:mangrove", "ex:site-B",
        "--set", "site.tidal_inundation_pct=40 pct",
    )
    assert code == EXIT_OK
    assert "UNSAT -> SAT" in out


def test_execute_and_tasks_flow(capsys, bundle_path):
    code, out = run_json(capsys, bundle_path, "execute", "ex:histology", "ex:lab-1")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["status"] == "waiting_manual"
    execution_id = record["id"]

    code, out, _ = run(capsys, bundle_path, "tasks", "list", "--execution", execution_id)
    assert "prep" in out

    code, out = run_json(
        capsys, bundle_path, "tasks", "complete", execution_id, "prep",
        "--output", "stained_section=ex:lab-1",
    )
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "waiting_manual"

    code, out = run_json(
        capsys, bundle_path, "tasks", "complete", execution_id, "identify",
        "--output", 'composition_description="mostly parenchyma"',
    )
    assert json.loads(out)["status"] == "completed"

    # mutations were persisted to the bundle
    reloaded = UnitStore.load_bundle(bundle_path)
    assert reloaded.get_unit(execution_id).status == "completed"


def test_evidence_add_persists(capsys, bundle_path):
    code, out = run_json(capsys, bundle_path, "evidence", "add", "ex:mangrove", "ex:site-A", "--id", "t:ev")
    assert code == EXIT_OK
    assert json.loads(out) == {"id": "t:ev"}
    code, out = run_json(capsys, bundle_path, "eval", "ex:mangrove", "ex:site-A")
    assert json.loads(out)["grade"] == "validated"


def test_put_units_from_file(capsys, bundle_path, tmp_path):
    unit_file = tmp_path / "unit.json"
    unit_file.write_text(json.dumps({"id": "t:new", "kind": "context", "frame": "situation", "assertions": []}))
    code, out = run_json(capsys, bundle_path, "put", str(unit_file))
    assert code == EXIT_OK
    assert json.loads(out) == {"ids": ["t:new"]}
    assert "t:new" in UnitStore.load_bundle(bundle_path).list_units(kind="context")


def test_dry_run_does_not_touch_bundle(capsys, bundle_path):
    before = bundle_path.read_bytes()
    code, out = run_json(capsys, bundle_path, "execute", "ex:mangrove", "ex:site-A", "--dry-run")
    assert code == EXIT_OK
    assert bundle_path.read_bytes() == before


def test_bad_override_syntax_is_usage_error(capsys, bundle_path):
    code, _, err = run(capsys, bundle_path, "whatif", "ex:mangrove", "ex:site-A", "--set", "nonsense")
    assert code == EXIT_USAGE
