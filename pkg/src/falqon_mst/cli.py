"""Command-line harness: falqon-mst <success-rate|accuracy|trace|mst|decode>.

Experiment subcommands read an optional JSON config file (fields mirror
ExperimentConfig) with command-line flags taking precedence, and write
their fixed-format outputs into --out.  The dataset directory comes from
--data-dir, the FALQON_MST_DATA environment variable, or ./data.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import click
import numpy as np

from . import __version__
from .data import available_datasets, draw_samples, load_dataset
from .experiments import (
    ACCURACY_FIELDS,
    SUCCESS_FIELDS,
    ExperimentConfig,
    config_from_file,
    falqon_on_graph,
    normalized_dataset,
    run_accuracy,
    run_success_rate,
    write_outputs,
)
from .graph import WeightedGraph, build_complete_graph, prim_mst
from .pubo import PenaltyConfig, build_h_mst, decode, make_layout
from .statevector import bitstring_to_index

logger = logging.getLogger(__name__)


def _read_weights_csv(path: str) -> WeightedGraph:
    mat = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    if mat.shape[0] != mat.shape[1]:
        raise click.ClickException(f"{path}: weight matrix must be square, got {mat.shape}")
    return WeightedGraph(n=mat.shape[0], weights=mat, labels=tuple(0 for _ in range(mat.shape[0])))


_CONFIG_FLAGS = [
    ("dataset", str), ("runs", int), ("seed", int), ("dt", float), ("layers", int),
    ("a_scale", float), ("b", float), ("boost", float), ("top_k", int),
    ("normalize", bool), ("backend", str), ("workers", int), ("data_dir", str),
    ("out_dir", str),
]


def experiment_options(f):
    f = click.option("--config", "config_file", type=click.Path(exists=True), default=None,
                     help="JSON config file; flags override its values.")(f)
    f = click.option("--dataset", default=None, help="Manifest dataset name.")(f)
    f = click.option("--runs", type=int, default=None)(f)
    f = click.option("--seed", type=int, default=None, help="Base seed; run i uses mix64(seed+i).")(f)
    f = click.option("--dt", type=float, default=None)(f)
    f = click.option("--layers", type=int, default=None)(f)
    f = click.option("--a-scale", "a_scale", type=float, default=None,
                     help="Constraint weight a = a_scale * total edge weight.")(f)
    f = click.option("--b", type=float, default=None, help="Edge-cost weight.")(f)
    f = click.option("--boost", type=float, default=None, help="Multiplier on the root/level constraint families.")(f)
    f = click.option("--top-k", "top_k", type=int, default=None)(f)
    f = click.option("--min-delta", "min_delta", type=float, default=None,
                     help="Stop a run early once the per-layer energy change falls below "
                          "this value (smoke-test aid; off by default).")(f)
    f = click.option("--normalize/--no-normalize", default=None,
                     help="Min-max feature scaling over the corpus (default on; raw "
                          "feature distances make the evolution far less reliable).")(f)
    f = click.option("--backend", type=click.Choice(["auto", "numpy", "numba"]), default=None)(f)
    f = click.option("--workers", type=int, default=None, help="Parallel runs (outputs identical for any value).")(f)
    f = click.option("--data-dir", default=None)(f)
    f = click.option("--out", "out_dir", default=None, help="Output directory.")(f)
    return f


def build_config(config_file: str | None, **flags) -> ExperimentConfig:
    overrides = {k: v for k, v in flags.items() if v is not None}
    if config_file:
        return config_from_file(config_file, overrides)
    return ExperimentConfig(**overrides)


@click.group()
@click.version_option(version=__version__)
def main():
    """Spanning-tree Hamiltonians, feedback-based minimization, OPF classification."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command("success-rate")
@experiment_options
def cmd_success_rate(config_file, **flags):
    """Ground-state preparation rates over seeded 4-sample draws."""
    cfg = build_config(config_file, **flags)
    _require_dataset(cfg)
    report, rows, metadata = run_success_rate(cfg)
    out = write_outputs(cfg.out_dir, report, rows, metadata, SUCCESS_FIELDS)
    click.echo(
        f"{cfg.dataset}: success {report['success_rate']:.2%}, "
        f"top-{cfg.top_k} {report['top_k_rate']:.2%} over {cfg.runs} runs -> {out}"
    )


@main.command("accuracy")
@click.option("--methods", default=None, help="Comma-separated subset of: prim,falqon-pubo")
@click.option("--fallback", type=click.Choice(["ground", "invalid"]), default=None,
              help="When to replace the decoded tree with Prim's: on any non-ground "
                   "top state (default) or only on constraint-violating ones.")
@experiment_options
def cmd_accuracy(config_file, methods, fallback, **flags):
    """OPF accuracy with prototypes from Prim and/or decoded FALQON trees."""
    if methods is not None:
        flags["methods"] = tuple(m.strip() for m in methods.split(",") if m.strip())
    if fallback is not None:
        flags["fallback"] = fallback
    cfg = build_config(config_file, **flags)
    _require_dataset(cfg)
    report, rows, metadata = run_accuracy(cfg)
    out = write_outputs(cfg.out_dir, report, rows, metadata, ACCURACY_FIELDS)
    means = ", ".join(f"{k}={v:.5f}" for k, v in report["mean_accuracy"].items())
    click.echo(f"{cfg.dataset}: mean accuracy {means} over {cfg.runs} subsets -> {out}")


@main.command("trace")
@click.option("--indices", default=None,
              help="Comma-separated dataset row indices (overrides the seeded draw).")
@click.option("--plots/--no-plots", default=False,
              help="Also render trace/top-state figures (requires the mst-figures package).")
@experiment_options
def cmd_trace(config_file, indices, plots, **flags):
    """One full run: trace.csv, result.json, decoded.json (and optional figures)."""
    cfg = build_config(config_file, **flags)
    _require_dataset(cfg)
    dataset = load_dataset(cfg.dataset, cfg.data_dir)
    if cfg.normalize:
        dataset = normalized_dataset(dataset)
    if indices:
        rows = [int(i) for i in indices.split(",")]
        samples = [dataset.samples[i] for i in rows]
    else:
        samples = draw_samples(dataset, 4, cfg.run_seed(0))
    graph = build_complete_graph(samples)
    graph_run = falqon_on_graph(graph, cfg)
    result = graph_run.result

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.trace.write_csv(out / "trace.csv")
    result.write_json(out / "result.json")

    from falqon_mst.falqon import dt_bound
    from falqon_mst.statevector import DriverSpec

    bound = dt_bound(graph_run.diag, DriverSpec.all_qubits(graph_run.diag.m))
    click.echo(f"monotonicity dt bound {bound:.3e}; running with dt={cfg.dt:g}")

    top_bits = result.top_states[0][0]
    sol = decode(bitstring_to_index(top_bits), graph, graph_run.layout, graph_run.penalties)
    decoded = {
        "bitstring": top_bits,
        "root": sol.root,
        "level_of": list(sol.level_of),
        "edges": sorted(list(e) for e in sol.edges),
        "violations": [
            {"term": v.term, "subject": list(v.subject), "description": v.description}
            for v in sol.violations
        ],
        "energy": sol.energy,
        "is_valid_tree": sol.is_valid_tree,
        "prim_edges": sorted(list(e) for e in prim_mst(graph).edges),
    }
    with open(out / "decoded.json", "w") as fh:
        json.dump(decoded, fh, indent=2, sort_keys=True)
        fh.write("\n")

    click.echo(
        f"final energy {result.final_energy:.6f}, ground {result.ground_energy:.6f}, "
        f"success={result.success} -> {out}"
    )
    if plots:
        _render_plots(out)


def _render_plots(out: Path) -> None:
    try:
        from mst_figures import plot_energy, plot_top_states
    except ImportError:
        raise click.ClickException(
            "plot rendering requires the mst-figures package (pip install ./figures)"
        )
    plot_energy(out / "trace.csv", out / "trace.png")
    plot_top_states(out / "result.json", out / "top_states.png")
    click.echo(f"figures -> {out / 'trace.png'}, {out / 'top_states.png'}")


@main.command("mst")
@click.option("--weights", "weights_file", required=True, type=click.Path(exists=True),
              help="CSV file with a square symmetric weight matrix.")
def cmd_mst(weights_file):
    """Prim minimum spanning tree of a weight-matrix graph."""
    graph = _read_weights_csv(weights_file)
    tree = prim_mst(graph)
    for u, v in tree.sorted_edges():
        click.echo(f"{u} {v} {graph.edge_weight(u, v)!r}")
    click.echo(f"total {tree.total_weight!r}")


@main.command("decode")
@click.option("--weights", "weights_file", required=True, type=click.Path(exists=True))
@click.option("--bits", required=True,
              help="0/1 text, character j = layout variable j (x variables first).")
@click.option("--a-scale", "a_scale", type=float, default=0.1)
@click.option("--b", type=float, default=0.1)
@click.option("--boost", type=float, default=3.0)
@click.option("--poly-out", type=click.Path(), default=None,
              help="Also write the compiled polynomial in text form.")
def cmd_decode(weights_file, bits, a_scale, b, boost, poly_out):
    """Decode a bitstring against a weight-matrix graph; print the solution as JSON."""
    graph = _read_weights_csv(weights_file)
    layout = make_layout(graph)
    penalties = PenaltyConfig.paper_defaults(graph, a_scale=a_scale, b=b, boost=boost)
    if len(bits) != layout.total:
        raise click.ClickException(f"bitstring length {len(bits)} != layout total {layout.total}")
    sol = decode(bits, graph, layout, penalties)
    payload = {
        "root": sol.root,
        "level_of": list(sol.level_of),
        "edges": sorted(list(e) for e in sol.edges),
        "violations": [
            {"term": v.term, "subject": list(v.subject), "description": v.description}
            for v in sol.violations
        ],
        "energy": sol.energy,
        "is_valid_tree": sol.is_valid_tree,
    }
    click.echo(json.dumps(payload, indent=2, sort_keys=True))
    if poly_out:
        poly, _ = build_h_mst(graph, penalties)
        Path(poly_out).write_text(poly.to_text())


@main.command("datasets")
@click.option("--data-dir", default=None)
def cmd_datasets(data_dir):
    """List manifest datasets present in the data directory."""
    names = available_datasets(data_dir)
    if not names:
        click.echo("no dataset files found (see scripts/fetch_datasets.py)")
    for name in names:
        ds = load_dataset(name, data_dir)
        click.echo(f"{name}: {len(ds)} samples, {ds.feature_dim} features, "
                   f"{ds.class_count} classes, {ds.dropped_rows} rows dropped")


def _require_dataset(cfg: ExperimentConfig) -> None:
    if not cfg.dataset:
        raise click.ClickException("--dataset (or a config file naming one) is required")


if __name__ == "__main__":
    main()
