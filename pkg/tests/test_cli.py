"""Command-line interface: every subcommand, exit codes, and --json output."""

import json

import pytest

from coldroute.cli import main
from coldroute.config import ENV_CONFIG
from coldroute.graph import EvidenceGraph
from coldroute.profiles import load_profiles
from coldroute.routers import CandidatePool, load_router

from conftest import FIXTURE_DIR

CARDS = str(FIXTURE_DIR / "cards")
COLDSTART_CFG = str(FIXTURE_DIR / "coldstart.json")
INTEGRATE_CFG = str(FIXTURE_DIR / "integrate.json")
CATALOG = ["model_00_00", "model_00_01", "model_01_00", "model_01_01"]


@pytest.fixture(autouse=True)
def _no_ambient_config(monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)


def _json_out(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


# --- graph -----------------------------------------------------------------

def test_graph_validate_reports_shape(capsys):
    assert main(["graph", "validate", "--cards", CARDS]) == 0
    out = capsys.readouterr().out
    assert "nodes: 35" in out and "edges: 40" in out and "valid: True" in out


def test_graph_build_writes_loadable_snapshot(tmp_path, capsys):
    out = tmp_path / "graph.json"
    assert main(["graph", "build", "--cards", CARDS, "--out", str(out), "--json"]) == 0
    payload = _json_out(capsys)
    assert payload["nodes"] == 35 and payload["path"] == str(out)
    graph = EvidenceGraph.load(out)
    assert len(graph) == 35 and graph.dim == 64


def test_graph_validate_rejects_dangling_cards(tmp_path, capsys):
    bad = tmp_path / "cards"
    bad.mkdir()
    (bad / "families.json").write_text("[]")
    (bad / "models.json").write_text(
        json.dumps([{"id": "model_00", "family_id": "fam_missing", "description": "x", "scores": {}}])
    )
    (bad / "benchmarks.json").write_text("[]")
    (bad / "domains.json").write_text("[]")
    (bad / "queries.jsonl").write_text("")
    assert main(["graph", "validate", "--cards", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


# --- profiles --------------------------------------------------------------

def test_profile_command_writes_profiles(tmp_path, capsys):
    out = tmp_path / "profiles.jsonl"
    rc = main(
        ["profile", "--config", COLDSTART_CFG, "--spec", "emb:2", "--out", str(out), "--json"]
    )
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["spec"] == "emb:2" and payload["models"] == 4
    profiles = load_profiles(out)
    assert sorted(profiles) == CATALOG


def test_profile_trainable_spec_also_saves_aggregator(tmp_path, capsys):
    out = tmp_path / "profiles.jsonl"
    rc = main(
        ["profile", "--config", COLDSTART_CFG, "--spec", "train:1", "--out", str(out), "--json"]
    )
    assert rc == 0
    payload = _json_out(capsys)
    agg = json.loads((tmp_path / "profiles.aggregator.json").read_text())
    assert payload["aggregator"].endswith("profiles.aggregator.json")
    assert agg["depth"] == 1


# --- router training and routing -------------------------------------------

@pytest.mark.parametrize("kind", ["sim", "mlp", "graphrouter"])
def test_router_train_writes_checkpoint_and_pool(tmp_path, capsys, kind):
    out = tmp_path / "router.json"
    pool_out = tmp_path / "pool.json"
    rc = main(
        [
            "router", "train", kind,
            "--config", INTEGRATE_CFG,
            "--out", str(out), "--pool-out", str(pool_out), "--json",
        ]
    )
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["router"] == kind
    assert len(payload["checksum"]) == 64 and int(payload["checksum"], 16) >= 0
    router = load_router(out)
    assert router.to_checkpoint()["kind"] == kind
    pool = CandidatePool.load(pool_out)
    assert pool.ids == CATALOG


def test_route_command_uses_trained_router(tmp_path, capsys):
    out, pool_out = tmp_path / "router.json", tmp_path / "pool.json"
    main(["router", "train", "mlp", "--config", INTEGRATE_CFG,
          "--out", str(out), "--pool-out", str(pool_out)])
    capsys.readouterr()
    rc = main(
        [
            "route", "--config", INTEGRATE_CFG,
            "--router", str(out), "--pool-state", str(pool_out),
            "--query", "Fix the flaky unit test in the parser module.", "--json",
        ]
    )
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["model_id"] in CATALOG
    assert sorted(payload["scores"]) == CATALOG


def test_route_command_graphrouter_needs_task(tmp_path, capsys):
    out, pool_out = tmp_path / "router.json", tmp_path / "pool.json"
    main(["router", "train", "graphrouter", "--config", INTEGRATE_CFG,
          "--out", str(out), "--pool-out", str(pool_out)])
    capsys.readouterr()
    base = [
        "route", "--config", INTEGRATE_CFG,
        "--router", str(out), "--pool-state", str(pool_out),
        "--query", "Sum the first ten squares.",
    ]
    assert main(base) == 1  # no --task
    assert "error:" in capsys.readouterr().err
    assert main(base + ["--task", "task_00", "--json"]) == 0
    assert _json_out(capsys)["model_id"] in CATALOG


def test_route_without_pool_source_fails(capsys):
    rc = main(["route", "--config", COLDSTART_CFG, "--query", "hello"])
    assert rc == 1
    assert "pool" in capsys.readouterr().err


# --- evaluation ------------------------------------------------------------

def test_eval_coldstart_is_byte_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        rc = main(
            ["eval", "coldstart", "--config", COLDSTART_CFG,
             "--out", str(tmp_path / name), "--json"]
        )
        assert rc == 0
        payload = _json_out(capsys)
        assert payload["protocol"] == "coldstart"
        assert 0.0 <= payload["average_performance"] <= payload["oracle"]
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_eval_integrate_reports_ncir_and_checksum(tmp_path, capsys):
    rc = main(
        ["eval", "integrate", "--config", INTEGRATE_CFG,
         "--out", str(tmp_path / "int"), "--json"]
    )
    assert rc == 0
    payload = _json_out(capsys)
    assert "ncir" in payload and payload["router"] == "graphrouter"
    report = json.loads((tmp_path / "int.json").read_text())
    assert report["new_model_id"] == "model_01_02"
    assert len(report["router_checksum"]) == 64
    assert report["num_queries"] == 12


def test_eval_integrate_rejects_leaked_interactions(tmp_path, capsys):
    leaked = tmp_path / "interactions.jsonl"
    rows = (FIXTURE_DIR / "interactions.jsonl").read_text()
    leak_row = json.dumps(
        {"model_id": "model_01_02", "query_id": "q_00_0000", "reward": 1.0}, sort_keys=True
    )
    leaked.write_text(rows + leak_row + "\n")
    cfg = json.loads((FIXTURE_DIR / "integrate.json").read_text())
    cfg["cards_dir"] = str(FIXTURE_DIR / "cards")
    cfg["rewards"] = str(FIXTURE_DIR / "rewards.jsonl")
    cfg["tasks"] = str(FIXTURE_DIR / "tasks.jsonl")
    cfg["new_model_card"] = str(FIXTURE_DIR / "new_model.json")
    cfg["interactions"] = str(leaked)
    cfg_path = tmp_path / "leaky.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(
        ["eval", "integrate", "--config", str(cfg_path), "--out", str(tmp_path / "x")]
    )
    assert rc == 1
    assert "model_01_02" in capsys.readouterr().err


# --- integration subcommand ------------------------------------------------

def test_integrate_command_grows_pool_and_stays_frozen(tmp_path, capsys):
    state = tmp_path / "pool_state.json"
    rc = main(
        [
            "integrate", "--config", INTEGRATE_CFG,
            "--card", str(FIXTURE_DIR / "new_model.json"),
            "--pool-state", str(state), "--json",
        ]
    )
    assert rc == 0
    payload = _json_out(capsys)
    assert payload["integrated"] == "model_01_02"
    assert payload["frozen"] is True
    assert payload["pool"] == CATALOG + ["model_01_02"]
    assert CandidatePool.load(state).ids == CATALOG + ["model_01_02"]


# --- exit codes ------------------------------------------------------------

def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["router", "train", "bogus"])
    assert err.value.code == 2


def test_missing_config_is_a_domain_error(capsys):
    rc = main(["profile"])
    assert rc == 1
    assert "config" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert capsys.readouterr().out.startswith("coldroute ")
