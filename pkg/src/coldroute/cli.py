"""Command-line interface.

Subcommands cover the pipeline end to end: build/validate the evidence
graph, compute profiles, train routers, route single queries, run the two
evaluation protocols, integrate a new model into a frozen pool, and serve
the routing API.  ``--json`` switches stdout to machine-readable JSON.

Exit codes: 0 success, 1 domain error (graph/config/protocol violations),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ENV_CONFIG, AppConfig, load_config, make_providers
from .errors import ColdRouteError, ConfigError, LeakedInteraction, UnknownModelInInteractions
from .evaluation import RewardTable, run_coldstart, run_integration
from .graph import EvidenceGraph, ModelCard, NodeKind, build_graph, load_cards
from .profiles import (
    ProfileSpec,
    TrainGnnModel,
    load_profiles,
    load_templates,
    make_profiles,
    save_profiles,
    traingnn_fit,
)
from .providers import encode_all
from .routers import (
    CandidatePool,
    SimRouter,
    graphrouter_fit,
    integrate_new_model,
    load_interactions,
    load_router,
    load_tasks,
    mlp_fit,
    router_checksum,
    save_router,
)

__all__ = ["main"]


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")


def _load_cfg(args) -> AppConfig:
    path = getattr(args, "config", None) or os.environ.get(ENV_CONFIG)
    if not path:
        raise ConfigError(f"no config given (use --config or {ENV_CONFIG})")
    return load_config(path)


def _build_graph_from_cards(cards_dir: Path, dim: int) -> EvidenceGraph:
    cards = load_cards(cards_dir)
    return build_graph(
        cards.families, cards.models, cards.benchmarks, cards.domains, cards.queries, dim
    )


def _prepared_graph(cfg: AppConfig):
    """Graph built from the configured cards, fully encoded."""
    providers = make_providers(cfg)
    graph = _build_graph_from_cards(cfg.cards_dir, cfg.dim)
    encode_all(graph, providers.encoder)
    return graph, providers


def _pool_ids(cfg: AppConfig, graph: EvidenceGraph) -> list[str]:
    if cfg.pool:
        return list(cfg.pool)
    return [n.id for n in graph.nodes_of_kind(NodeKind.MODEL)]


def _templates(cfg: AppConfig):
    return load_templates(cfg.templates_dir) if cfg.templates_dir else None


def _load_card(path: Path) -> ModelCard:
    entry = json.loads(Path(path).read_text())
    return ModelCard(
        id=entry["id"],
        family_id=entry["family_id"],
        description=entry["description"],
        scores={k: float(v) for k, v in entry.get("scores", {}).items()},
    )


# --- subcommands -----------------------------------------------------------

def _cmd_graph(args) -> dict:
    if args.cards:
        cards_dir, dim = Path(args.cards), args.dim
    else:
        cfg = _load_cfg(args)
        cards_dir, dim = cfg.cards_dir, cfg.dim
    graph = _build_graph_from_cards(cards_dir, dim)
    info = {
        "nodes": len(graph),
        "edges": len(graph.edges),
        "dim": graph.dim,
        "valid": True,
    }
    if args.action == "build":
        if args.encode:
            cfg = _load_cfg(args)
            encode_all(graph, make_providers(cfg).encoder)
        out = Path(args.out or "graph.json")
        graph.save(out)
        info["path"] = str(out)
    return info


def _cmd_profile(args) -> dict:
    cfg = _load_cfg(args)
    graph, providers = _prepared_graph(cfg)
    spec = ProfileSpec.parse(args.spec or cfg.spec)
    pool = list(args.pool) if args.pool else _pool_ids(cfg, graph)
    trained = None
    if spec.learning == "trainable":
        trained = traingnn_fit(graph, spec, cfg.seed)
    profiles = make_profiles(
        graph, spec, pool, providers, seed=cfg.seed, templates=_templates(cfg), trained=trained
    )
    out = Path(args.out) if args.out else cfg.base_dir / "profiles.jsonl"
    save_profiles(profiles, out)
    info = {"spec": spec.short(), "models": len(profiles), "path": str(out)}
    if trained is not None:
        agg_path = cfg.aggregator or out.with_suffix(".aggregator.json")
        Path(agg_path).write_text(json.dumps(trained.to_checkpoint(), sort_keys=True))
        info["aggregator"] = str(agg_path)
    return info


def _cmd_router_train(args) -> dict:
    cfg = _load_cfg(args)
    graph, providers = _prepared_graph(cfg)
    spec = ProfileSpec.parse(args.spec or cfg.spec)
    pool_ids = _pool_ids(cfg, graph)
    if cfg.interactions is None:
        raise ConfigError("router training needs an interactions file in the config")
    interactions = load_interactions(cfg.interactions)
    new_id = None
    if cfg.new_model_card is not None:
        new_id = _load_card(cfg.new_model_card).id
    for rec in interactions:
        if new_id is not None and rec.model_id == new_id:
            raise LeakedInteraction(rec.model_id)
        if rec.model_id not in pool_ids:
            raise UnknownModelInInteractions(rec.model_id)

    trained = traingnn_fit(graph, spec, cfg.seed) if spec.learning == "trainable" else None
    profiles = make_profiles(
        graph, spec, pool_ids, providers, seed=cfg.seed, templates=_templates(cfg), trained=trained
    )
    pool = CandidatePool([profiles[m] for m in pool_ids])
    query_vecs = {
        qid: graph.node(qid).embedding for qid in sorted({r.query_id for r in interactions})
    }
    kind = args.kind
    if kind == "sim":
        router = SimRouter(dim=pool.dim)
    elif kind == "mlp":
        router = mlp_fit(interactions, query_vecs, pool, hidden=cfg.hidden, seed=cfg.seed)
    elif kind == "graphrouter":
        if cfg.tasks is None:
            raise ConfigError("the graph router needs a tasks file in the config")
        tasks = load_tasks(cfg.tasks)
        train_tasks = {qid: tasks[qid] for qid in query_vecs if qid in tasks}
        router = graphrouter_fit(
            train_tasks, query_vecs, interactions, pool, hidden=cfg.hidden, seed=cfg.seed
        )
    else:
        raise ConfigError(f"unknown router kind {kind!r}")

    out = Path(args.out) if args.out else cfg.base_dir / f"router_{kind}.json"
    save_router(router, out)
    pool_out = Path(args.pool_out) if args.pool_out else out.with_name(out.stem + "_pool.json")
    pool.save(pool_out)
    return {
        "router": kind,
        "path": str(out),
        "pool_path": str(pool_out),
        "checksum": router_checksum(router),
        "interactions": len(interactions),
    }


def _cmd_route(args) -> dict:
    cfg = _load_cfg(args)
    providers = make_providers(cfg)
    router = load_router(args.router) if args.router else SimRouter(dim=cfg.dim)
    if args.pool_state:
        pool = CandidatePool.load(args.pool_state)
    elif args.profiles:
        profiles = load_profiles(args.profiles)
        pool = CandidatePool([profiles[m] for m in sorted(profiles)])
    else:
        raise ConfigError("route needs --pool-state or --profiles")
    vec = providers.encoder.encode(args.query)
    decision = router.route(np.asarray(vec), pool, query_id="cli", task_id=args.task)
    return {"model_id": decision.chosen, "scores": decision.to_dict()["scores"]}


def _eval_common(args):
    cfg = _load_cfg(args)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.spec:
        cfg.spec = args.spec
    graph, providers = _prepared_graph(cfg)
    if cfg.rewards is None:
        raise ConfigError("evaluation needs a rewards file in the config")
    rewards = RewardTable.load(cfg.rewards)
    queries = cfg.eval_queries or [q for q in rewards.query_ids if q in graph]
    out_base = Path(args.out) if args.out else cfg.out
    return cfg, graph, providers, rewards, queries, out_base


def _write_report(report, out_base: Path, as_json: bool) -> dict:
    json_path = out_base.with_suffix(".json")
    csv_path = out_base.with_suffix(".csv")
    report.write_json(json_path)
    report.write_csv(csv_path)
    info = {
        "protocol": report.protocol,
        "spec": report.spec,
        "router": report.router,
        "num_queries": report.num_queries,
        "average_performance": report.average_performance,
        "oracle": report.oracle,
        "single_best": report.single_best,
        "random_mean": report.random_mean,
        "report_json": str(json_path),
        "report_csv": str(csv_path),
    }
    if report.ncir is not None:
        info["ncir"] = report.ncir
    return info


def _cmd_eval_coldstart(args) -> dict:
    cfg, graph, providers, rewards, queries, out_base = _eval_common(args)
    pool = _pool_ids(cfg, graph)
    report = run_coldstart(
        graph,
        ProfileSpec.parse(cfg.spec),
        pool,
        queries,
        rewards,
        providers,
        seed=cfg.seed,
        random_seeds=cfg.random_seeds,
        templates=_templates(cfg),
    )
    return _write_report(report, out_base, args.json)


def _cmd_eval_integrate(args) -> dict:
    cfg, graph, providers, rewards, queries, out_base = _eval_common(args)
    if args.router:
        cfg.router = args.router
    if cfg.new_model_card is None:
        raise ConfigError("integration needs a new_model_card in the config")
    if cfg.interactions is None:
        raise ConfigError("integration needs an interactions file in the config")
    new_card = _load_card(cfg.new_model_card)
    old_pool = [m for m in _pool_ids(cfg, graph) if m != new_card.id]
    interactions = load_interactions(cfg.interactions)
    tasks = load_tasks(cfg.tasks) if cfg.tasks else None
    report = run_integration(
        graph,
        ProfileSpec.parse(cfg.spec),
        old_pool,
        new_card,
        cfg.router,
        interactions,
        queries,
        rewards,
        providers,
        cfg.seed,
        tasks=tasks,
        threshold=cfg.threshold,
        random_seeds=cfg.random_seeds,
        templates=_templates(cfg),
        hidden=cfg.hidden,
    )
    return _write_report(report, out_base, args.json)


def _cmd_integrate(args) -> dict:
    cfg = _load_cfg(args)
    graph, providers = _prepared_graph(cfg)
    spec = ProfileSpec.parse(args.spec or cfg.spec)
    card = _load_card(Path(args.card))
    trained = None
    if spec.learning == "trainable":
        if cfg.aggregator and Path(cfg.aggregator).exists():
            trained = TrainGnnModel.from_checkpoint(json.loads(Path(cfg.aggregator).read_text()))
        else:
            trained = traingnn_fit(graph, spec, cfg.seed)
    if args.pool_state and Path(args.pool_state).exists():
        pool = CandidatePool.load(args.pool_state)
    else:
        pool_ids = [m for m in _pool_ids(cfg, graph) if m != card.id]
        profiles = make_profiles(
            graph, spec, pool_ids, providers, seed=cfg.seed,
            templates=_templates(cfg), trained=trained,
        )
        pool = CandidatePool([profiles[m] for m in pool_ids])
    router = load_router(args.router) if args.router else SimRouter(dim=cfg.dim)
    before = router_checksum(router)
    integrate_new_model(
        router, pool, graph, card, spec, providers, trained=trained, templates=_templates(cfg)
    )
    after = router_checksum(router)
    state = Path(args.pool_state) if args.pool_state else cfg.base_dir / "pool_state.json"
    pool.save(state)
    return {
        "integrated": card.id,
        "pool": pool.ids,
        "pool_state": str(state),
        "checksum_before": before,
        "checksum_after": after,
        "frozen": before == after,
    }


def _cmd_serve(args) -> dict:
    from .service import serve

    cfg = _load_cfg(args)
    if args.port is not None:
        cfg.port = args.port
    serve(cfg)  # blocks until interrupted
    return {"stopped": True}


# --- parser ----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coldroute",
        description="Cold-start LLM routing from public model-card signals.",
    )
    parser.add_argument("--version", action="version", version=f"coldroute {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help=f"config file (default: ${ENV_CONFIG})")
        p.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")

    p_graph = sub.add_parser("graph", help="build or validate the evidence graph")
    p_graph.add_argument("action", choices=["build", "validate"])
    p_graph.add_argument("--cards", help="card directory (else taken from config)")
    p_graph.add_argument("--dim", type=int, default=64)
    p_graph.add_argument("--out", help="snapshot path for build")
    p_graph.add_argument("--encode", action="store_true", help="embed node features in the snapshot")
    add_common(p_graph)
    p_graph.set_defaults(func=_cmd_graph)

    p_profile = sub.add_parser("profile", help="compute model profiles under a spec")
    p_profile.add_argument("--spec", help="flat | text:K | emb:K | train:K")
    p_profile.add_argument("--pool", nargs="*", help="model ids (default: all models)")
    p_profile.add_argument("--out", help="profiles JSONL path")
    add_common(p_profile)
    p_profile.set_defaults(func=_cmd_profile)

    p_router = sub.add_parser("router", help="router operations")
    router_sub = p_router.add_subparsers(dest="action", required=True)
    p_train = router_sub.add_parser("train", help="train a router on interactions")
    p_train.add_argument("kind", choices=["sim", "mlp", "graphrouter"])
    p_train.add_argument("--spec", help="profile spec for the pool")
    p_train.add_argument("--out", help="router checkpoint path")
    p_train.add_argument("--pool-out", dest="pool_out", help="pool state output path")
    add_common(p_train)
    p_train.set_defaults(func=_cmd_router_train)

    p_route = sub.add_parser("route", help="route one query")
    p_route.add_argument("--query", required=True)
    p_route.add_argument("--task", help="task id (graph router only)")
    p_route.add_argument("--router", help="router checkpoint path")
    p_route.add_argument("--profiles", help="profiles JSONL path")
    p_route.add_argument("--pool-state", dest="pool_state", help="pool state path")
    add_common(p_route)
    p_route.set_defaults(func=_cmd_route)

    p_eval = sub.add_parser("eval", help="run an evaluation protocol")
    eval_sub = p_eval.add_subparsers(dest="protocol", required=True)
    for name, func in (("coldstart", _cmd_eval_coldstart), ("integrate", _cmd_eval_integrate)):
        p = eval_sub.add_parser(name)
        p.add_argument("--spec", help="profile spec override")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--out", help="report base path (writes .json and .csv)")
        if name == "integrate":
            p.add_argument("--router", choices=["sim", "mlp", "graphrouter"])
        add_common(p)
        p.set_defaults(func=func)

    p_int = sub.add_parser("integrate", help="add a new model to a frozen pool")
    p_int.add_argument("--card", required=True, help="new model card JSON")
    p_int.add_argument("--spec", help="profile spec override")
    p_int.add_argument("--router", help="router checkpoint path")
    p_int.add_argument("--pool-state", dest="pool_state", help="pool state path")
    add_common(p_int)
    p_int.set_defaults(func=_cmd_integrate)

    p_serve = sub.add_parser("serve", help="run the routing service")
    p_serve.add_argument("--port", type=int)
    add_common(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
    except ColdRouteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(payload, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
