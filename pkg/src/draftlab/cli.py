"""Command-line interface: thin wrappers over the library and the HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analytics, synthgen
from .corpus import CorpusStore
from .draft import Action, new_draft, recommend as draft_recommend, replay, state_from_dict, state_to_dict
from .errors import DataError, DraftlabError, ProviderError
from .features import FEATURE_ORDER, export_feature_matrix, team_features
from .space import ChampionCatalog, SimilaritySpace, build_space
from .winmodel import WinModel, ablate as run_ablate, train as run_train

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Generator/provider config file (JSON).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out-dir", type=click.Path(), default=None, help="Directory for emitted tables.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_context
def cli(ctx, config_path, seed, out_dir, fmt):
    """Team-design analytics and draft assistant."""
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, seed=seed, out_dir=out_dir, fmt=fmt)


def _emit(ctx, df, name: str) -> None:
    fmt = ctx.obj["fmt"]
    out_dir = ctx.obj["out_dir"]
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        path = Path(out_dir) / f"{name}.{fmt}"
        if fmt == "csv":
            df.to_csv(path, index=False)
        else:
            path.write_text(df.to_json(orient="records"))
        click.echo(f"wrote {path}")
    else:
        click.echo(df.to_csv(index=False) if fmt == "csv" else df.to_json(orient="records"))


def _store(corpus_dir) -> CorpusStore:
    return CorpusStore(corpus_dir)


def _load_space(store: CorpusStore) -> SimilaritySpace:
    if not store.space_path.exists():
        raise DataError(f"no space artifact at {store.space_path}; run build-space first")
    return SimilaritySpace.load(store.space_path)


def _feature_rows(store: CorpusStore):
    space = _load_space(store)
    matches = store.load_matches()
    histories = store.load_histories()
    rows = []
    for match in matches:
        for team in match.teams:
            vec = team_features(space, match, team.side, histories)
            rows.append((match.region, match.tier, match.division, team.side, team.outcome,
                         match.match_id, vec))
    return rows


@cli.command("build-space")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--components", type=int, default=10, show_default=True)
@click.option("--clusters", type=int, default=5, show_default=True)
@click.option("--build-seed", type=int, default=0, show_default=True)
@click.pass_context
def build_space_cmd(ctx, corpus_dir, components, clusters, build_seed):
    """Build the champion similarity space from the corpus catalog."""
    store = _store(corpus_dir)
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else build_seed
    space = build_space(store.load_catalog(), components=components, clusters=clusters, seed=seed)
    store.ensure_dirs()
    space.save(store.space_path)
    store.write_manifest(seeds={"space": seed})
    click.echo(f"space: {len(space.champion_ids)} champions, P={components}, K={clusters} -> {store.space_path}")


@cli.command("gen-corpus")
@click.argument("out_dir", type=click.Path())
@click.option("--matches", "n_matches", type=int, default=None, help="Override n_matches.")
@click.pass_context
def gen_corpus_cmd(ctx, out_dir, n_matches):
    """Generate a seeded synthetic corpus (catalog, players, matches, ground truth)."""
    payload = {}
    if ctx.obj["config_path"]:
        payload = json.loads(Path(ctx.obj["config_path"]).read_text())
    if ctx.obj["seed"] is not None:
        payload["seed"] = ctx.obj["seed"]
    if n_matches is not None:
        payload["n_matches"] = n_matches
    config = synthgen.GeneratorConfig(**payload)
    catalog, labels = synthgen.gen_catalog(config)
    players = synthgen.gen_players(config)
    components = min(10, catalog.dim, catalog.n_champions - 1)
    space = build_space(catalog, components=components, clusters=config.n_clusters, seed=config.seed)
    matches, truth = synthgen.gen_matches(config, catalog, players, space=space)
    truth.planted_labels = labels

    store = _store(out_dir)
    store.ensure_dirs()
    store.save_catalog(catalog)
    store.save_histories(players)
    store.save_matches(matches)
    space.save(store.space_path)
    truth.save(store.truth_path)
    store.write_manifest(seeds={"generator": config.seed, "space": config.seed})
    click.echo(f"corpus: {len(matches)} matches, {len(players)} players -> {store.root}")


@cli.command("compute-features")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_context
def compute_features_cmd(ctx, corpus_dir, out_path):
    """Export the per-team feature matrix as CSV in documented column order."""
    store = _store(corpus_dir)
    rows = _feature_rows(store)
    path = out_path or (store.root / "features.csv")
    export_feature_matrix(
        [(m, t, d, s, o, v) for (_, t, d, s, o, m, v) in rows], path
    )
    click.echo(f"wrote {len(rows)} rows -> {path}")


def _grouped_rows(rows, pooled: bool):
    if pooled:
        return {("SYN", "pooled"): [(v, o) for (*_, o, _m, v) in rows]}
    groups = {}
    for region, tier, _div, _side, outcome, _mid, vec in rows:
        groups.setdefault((region, tier), []).append((vec, outcome))
    return groups


@cli.command("train")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--l2", "l2_lambda", type=float, default=1e-4, show_default=True)
@click.option("--pooled", is_flag=True, help="Train one pooled model instead of per (region, tier).")
@click.pass_context
def train_cmd(ctx, corpus_dir, folds, l2_lambda, pooled):
    """Train per-(region, tier) logistic win models with cross-validation."""
    store = _store(corpus_dir)
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else 0
    rows = _feature_rows(store)
    for (region, tier), cell in sorted(_grouped_rows(rows, pooled).items()):
        model = run_train(cell, region=region, tier=tier, folds=folds,
                          l2_lambda=l2_lambda, seed=seed)
        name = "model" if pooled else f"model_{region}_{tier}"
        model.save(store.model_path(name))
        click.echo(f"{region}/{tier}: n={len(cell)} cv_accuracy={model.cv_accuracy:.4f} -> {store.model_path(name)}")
    store.write_manifest(seeds={"train": seed})


@cli.command("ablate")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--l2", "l2_lambda", type=float, default=1e-4, show_default=True)
@click.pass_context
def ablate_cmd(ctx, corpus_dir, folds, l2_lambda):
    """Full-model vs single-feature CV accuracies on the pooled corpus."""
    import pandas as pd

    store = _store(corpus_dir)
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else 0
    rows = [(v, o) for (*_, o, _m, v) in _feature_rows(store)]
    subsets = {"all_features": list(FEATURE_ORDER)}
    subsets.update({name: [name] for name in FEATURE_ORDER})
    table = run_ablate(rows, subsets, folds=folds, l2_lambda=l2_lambda, seed=seed)
    _emit(ctx, pd.DataFrame(table, columns=["subset", "cv_accuracy"]), "ablation")


@cli.group("analyze")
def analyze_group():
    """Aggregate analyses over a corpus."""


def _tables(corpus_dir):
    store = _store(corpus_dir)
    space = _load_space(store)
    matches = store.load_matches()
    histories = store.load_histories()
    return space, matches, histories


@analyze_group.command("tiers")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.pass_context
def analyze_tiers(ctx, corpus_dir):
    space, matches, histories = _tables(corpus_dir)
    df = analytics.tier_profile(analytics.build_team_table(matches, histories, space))
    _emit(ctx, df, "tier_profile")


@analyze_group.command("curve")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--feature", default="mean_proficiency", show_default=True)
@click.option("--bins", type=int, default=20, show_default=True)
@click.pass_context
def analyze_curve(ctx, corpus_dir, feature, bins):
    space, matches, histories = _tables(corpus_dir)
    team_df = analytics.build_team_table(matches, histories, space)
    _emit(ctx, analytics.relative_winrate_curve(team_df, feature, bins=bins), f"curve_{feature}")


@analyze_group.command("pickorder")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--bottom-bd-decile", is_flag=True)
@click.pass_context
def analyze_pickorder(ctx, corpus_dir, bottom_bd_decile):
    space, matches, histories = _tables(corpus_dir)
    slot_df = analytics.build_slot_table(matches, histories, space)
    means, ratios = analytics.pick_order_proficiency(slot_df, bottom_bd_decile=bottom_bd_decile)
    _emit(ctx, means, "pickorder_means")
    _emit(ctx, ratios, "pickorder_ratios")


@analyze_group.command("correlate")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--x", "x_feature", required=True)
@click.option("--y", "y_feature", required=True)
@click.option("--control", "controls", multiple=True)
@click.pass_context
def analyze_correlate(ctx, corpus_dir, x_feature, y_feature, controls):
    space, matches, histories = _tables(corpus_dir)
    team_df = analytics.build_team_table(matches, histories, space)
    df = analytics.correlation_by_tier(team_df, x_feature, y_feature, controls=tuple(controls))
    _emit(ctx, df, f"correlate_{x_feature}_{y_feature}")


cli.add_command(analyze_group)


@cli.command("recommend")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--state", "state_path", type=click.Path(exists=True), required=True,
              help="Draft state snapshot (JSON).")
@click.option("--model", "model_name", default="model", show_default=True)
@click.option("--top-n", type=int, default=5, show_default=True)
@click.pass_context
def recommend_cmd(ctx, corpus_dir, state_path, model_name, top_n):
    """One-shot pick recommendations for a saved draft state."""
    store = _store(corpus_dir)
    space = _load_space(store)
    model = WinModel.load(store.model_path(model_name))
    histories = store.load_histories()
    state = state_from_dict(json.loads(Path(state_path).read_text()), histories)
    result = draft_recommend(state, model, space, top_n=top_n)
    for c in result.candidates:
        click.echo(f"{c.champion_id}\t{c.win_probability:.4f}\t{c.explanation}")


@cli.command("simulate-draft")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--model", "model_name", default="model", show_default=True)
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Write the action log (JSONL) here.")
@click.option("--replay-log", type=click.Path(exists=True), default=None,
              help="Replay an existing action log instead of simulating.")
@click.pass_context
def simulate_draft_cmd(ctx, corpus_dir, model_name, log_path, replay_log):
    """Drive a full draft with recommended picks, or replay a logged one."""
    store = _store(corpus_dir)
    space = _load_space(store)
    histories = store.load_histories()
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else 0

    import numpy as np

    rng = np.random.default_rng(seed)
    players = sorted(h for h, v in histories.items() if v.usable)
    if len(players) < 10:
        raise DataError("need at least 10 usable players to simulate a draft")
    chosen = [players[i] for i in rng.choice(len(players), size=10, replace=False)]
    rosters = {"A": [histories[p] for p in chosen[:5]], "B": [histories[p] for p in chosen[5:]]}
    state = new_draft(space.champion_ids, rosters, {"A": "Top", "B": "Bottom"}, seed=seed)

    if replay_log:
        actions = [Action.from_dict(json.loads(line)["action"])
                   for line in Path(replay_log).read_text().splitlines() if line.strip()]
        state = replay(state, actions)
        click.echo(f"replayed {len(actions)} actions; final phase {state.phase}")
        click.echo(json.dumps(state_to_dict(state)))
        return

    from .draft import apply_action

    model = WinModel.load(store.model_path(model_name))
    log = []

    def step(action):
        nonlocal state
        state = apply_action(state, action)
        log.append({"seq": len(log) + 1, "actor": action.team or "system", "action": action.to_dict()})

    while state.phase == "Ban":
        team = state.ban_sequence[state.ban_cursor]
        pool = sorted(state.pool)
        step(Action("ban", team=team, champion=pool[int(rng.integers(len(pool)))]))
    while state.phase == "Pick":
        team, _ = state.acting_turn()
        top = draft_recommend(state, model, space, top_n=1).candidates[0]
        step(Action("pick", team=team, champion=top.champion_id))
    step(Action("finalize"))

    if log_path:
        Path(log_path).write_text("\n".join(json.dumps(entry) for entry in log) + "\n")
        click.echo(f"wrote {len(log)} actions -> {log_path}")
    click.echo(f"draft complete; picks: {json.dumps(state_to_dict(state)['picks'])}")


@cli.command("serve")
@click.argument("corpus_dir", type=click.Path(exists=True))
@click.option("--model", "model_name", default="model", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(corpus_dir, model_name, host, port):
    """Run the HTTP draft session service."""
    import uvicorn

    from .service import ServiceContext, create_app

    store = _store(corpus_dir)
    space = _load_space(store)
    context = ServiceContext(
        space=space,
        model=WinModel.load(store.model_path(model_name)),
        histories=store.load_histories(),
        catalog_ids=list(space.champion_ids),
    )
    uvicorn.run(create_app(context), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except ProviderError as exc:
        click.echo(f"provider error: {exc}", err=True)
        return EXIT_PROVIDER
    except (DataError, DraftlabError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except click.exceptions.Abort:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
