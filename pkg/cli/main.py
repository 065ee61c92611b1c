#!/usr/bin/env python3
"""
metnet: metaphor-mapping network analysis CLI

Builds the category multigraph from a mapping corpus and writes seeded,
byte-reproducible CSV/JSON reports plus a run manifest.

Usage:
    python cli/main.py <subcommand> --corpus data.csv --out reports/ [options]

Subcommands:
    ingest-check   - Validate corpus, size table and embeddings
    degrees        - Degree table, histograms, in/out and density correlations
    nullband       - Degree histograms against a null-model ensemble
    motifs         - Size-2/3 motif Z-scores against swap randomizations
    transitivity   - Outward transitivity per category
    persistence    - Edge-multiplicity distribution against multigraph swaps
    cluster        - Ward clustering of role distances over all tie orders
    curvature      - Forman and Ollivier curvature per connected pair
    embed-compare  - Role distances against word-vector distances
    report-all     - Everything above into one output directory

Examples:
    python cli/main.py degrees --corpus data/toy_corpus.csv --out r/
    python cli/main.py motifs --corpus data/toy_corpus.csv --size 3 --replicates 1000 --seed 42 --out r/
    python cli/main.py report-all --corpus data/toy_corpus.csv --embeddings data/toy_vectors.txt --dim 8 --seed 7 --out r/

Exit codes: 0 ok, 1 usage, 2 input error, 3 internal error.
"""
import os, sys, argparse, logging, time
from typing import Any, Callable, Dict, List, Optional

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # dotenv not available, continue without it

# Add parent directory to Python path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config import ConfigError, load_config, n_jobs_from
from src.logging_config import setup_logging
from src.ingest import (CategorySizeError, CorpusError, CorpusFormat, EmbeddingFormatError,
                        parse_category_sizes, parse_corpus, parse_embeddings, read_text)
from src.graph import BinSpec, build_multigraph, degree_histogram, degrees, degrees_frame, project_simple
from src.null_models import MODELS, SwapConfig
from src.motifs import (motif_significance, outward_transitivity, symmetry_fraction,
                        transitivity_frame, transitivity_vs_out_degree)
from src.persistence import ensemble_edge_mass, persistence_test
from src.roles import cluster_stability, role_distance, stability_summary, to_merge_list, to_newick, ward_hca_all
from src.curvature import count_modes, curvature_frame, curvature_histograms, ollivier_all
from src.embedding import build_paired_sample, compare
from src.degree_stats import degree_nullband, degree_scatter_stats, density_anticorrelation
from src.reports import PlotSpec, ReportWriter, RunManifest, gnuplot_script

logger = logging.getLogger("metnet.cli")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
INPUT_ERRORS = (OSError, UnicodeDecodeError, CorpusError, CategorySizeError, EmbeddingFormatError, ConfigError)


class UsageError(Exception):
    pass


class MetnetArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _non_negative_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


class Run:
    """Inputs, effective options and the writer shared by one invocation."""

    def __init__(self, args: argparse.Namespace, cfg: Dict[str, Any], writer: ReportWriter):
        self.args = args
        self.cfg = cfg
        self.writer = writer
        self.n_jobs = args.n_jobs if args.n_jobs is not None else n_jobs_from(cfg)
        self.replicates = args.replicates or cfg["null_models"]["replicates"]
        self.swaps_per_edge = cfg["null_models"]["swaps_per_edge"]
        self.ddof = cfg["null_models"]["ddof"]
        self._corpus = None
        self._graph = None
        self._sizes = None
        self._dist = None

    @property
    def manifest(self) -> RunManifest:
        return self.writer.manifest

    def swap_config(self, simple: Optional[bool] = None) -> SwapConfig:
        return SwapConfig(k=self.args.swaps, simple=not self.args.multi if simple is None else simple,
                          seed=self.args.seed, swaps_per_edge=self.swaps_per_edge)

    @property
    def corpus(self):
        if self._corpus is None:
            path = self.args.corpus
            self.manifest.record_input(path)
            fmt = CorpusFormat(self_loops=self.cfg["ingest"]["self_loops"])
            self._corpus = parse_corpus(read_text(path), fmt)
        return self._corpus

    @property
    def graph(self):
        if self._graph is None:
            self._graph = build_multigraph(self.corpus.records, n=self.corpus.n)
        return self._graph

    @property
    def names(self) -> List[str]:
        return self.corpus.names()

    @property
    def sizes(self):
        if self._sizes is None:
            stream = None
            if self.args.sizes:
                self.manifest.record_input(self.args.sizes)
                stream = read_text(self.args.sizes)
            self._sizes = parse_category_sizes(stream, self.corpus.categories, self.corpus.records)
        return self._sizes

    @property
    def role_distances(self):
        if self._dist is None:
            self._dist = role_distance(self.graph, self.names)
        return self._dist

    def embeddings(self):
        if not self.args.embeddings:
            raise UsageError("--embeddings is required for embed-compare")
        dim = self.args.dim or self.cfg["embedding"]["dim"]
        self.manifest.record_input(self.args.embeddings)
        return parse_embeddings(read_text(self.args.embeddings), dim)

    def plot(self, spec: PlotSpec, module: str, columns: List[str]) -> None:
        if self.args.gnuplot:
            name = os.path.splitext(spec.csv)[0] + ".gp"
            self.writer.write_text(name, gnuplot_script(spec, columns), module)


def _write_frame_with_plot(run: Run, name: str, df, module: str, plot: Optional[PlotSpec] = None) -> None:
    run.writer.write_csv(name, df, module)
    if plot is not None:
        run.plot(plot, module, list(df.columns))


def cmd_ingest_check(run: Run) -> None:
    c = run.corpus
    g = run.graph
    summary: Dict[str, Any] = {
        "records": len(c.records),
        "categories": c.n,
        "duplicate_rows": c.duplicate_rows,
        "skipped_self_loops": c.skipped_self_loops,
        "total_edges": g.total_edges,
        "connected_pairs": len(g.edges),
        "sizes": {"source": run.args.sizes or "derived", "derived": run.sizes.derived},
    }
    if run.args.embeddings:
        emb = run.embeddings()
        summary["embeddings"] = {"keys": len(emb.vectors), "dim": emb.dim, "duplicate_keys": emb.duplicate_keys}
    run.writer.write_csv("categories.csv", degrees_frame(degrees(g, run.sizes), run.names)[["category", "size"]],
                         "ingest")
    run.writer.write_json("ingest.json", summary, "ingest")


def cmd_degrees(run: Run) -> None:
    opts = run.cfg["degree_stats"]
    threshold = run.args.threshold if run.args.threshold is not None else opts["threshold"]
    records = degrees(run.graph, run.sizes)
    # category-level connections; word counts only enter through the densities
    simple = degrees(project_simple(run.graph), run.sizes)
    run.writer.write_csv("degrees.csv", degrees_frame(records, run.names), "degrees")
    run.writer.write_csv("degrees_simple.csv", degrees_frame(simple, run.names), "degrees")
    bins = BinSpec(float(opts["bin_width"]))
    for which in ("out", "in"):
        hist = degree_histogram(simple, which, "count", bins).to_frame()
        _write_frame_with_plot(run, f"degree_hist_{which}.csv", hist, "degrees",
                               PlotSpec(f"degree_hist_{which}.csv", "bin", ["count"], f"{which}-degree",
                                        style="boxes", logscale="y"))
    scatter = degree_scatter_stats(simple, threshold, opts["method"], run.names)
    _write_frame_with_plot(run, "degree_scatter.csv", scatter.frame, "degrees",
                           PlotSpec("degree_scatter.csv", "in", ["out"], "in vs out degree", style="points"))
    density = density_anticorrelation(records, opts["frac"], opts["method"], run.names)
    _write_frame_with_plot(run, "density.csv", density.frame, "degrees",
                           PlotSpec("density.csv", "in_density", ["out_density"], "in vs out density",
                                    style="points"))
    run.writer.write_json("degrees.json", {
        "sizes_derived": run.sizes.derived,
        "scatter": scatter.summary(),
        "density": density.summary(),
        "symmetry_fraction": symmetry_fraction(run.graph),
    }, "degrees")


def _model(run: Run) -> str:
    model = run.args.model or "er"
    if model == "config":
        model = "config-multi" if run.args.multi else "config-simple"
    return model


def cmd_nullband(run: Run) -> None:
    model = _model(run)
    bins = BinSpec(float(run.cfg["degree_stats"]["bin_width"]))
    summaries = {}
    for which in ("out", "in"):
        report = degree_nullband(run.graph, model, run.replicates, run.args.seed, which=which, bins=bins,
                                 k=run.args.swaps, swaps_per_edge=run.swaps_per_edge, ddof=run.ddof,
                                 n_jobs=run.n_jobs, progress=run.args.progress)
        _write_frame_with_plot(run, f"nullband_{which}.csv", report.frame, "nullband",
                               PlotSpec(f"nullband_{which}.csv", "bin", ["data_count", "rand_mean"],
                                        f"{which}-degree vs {model}", style="points", logscale="y",
                                        errors="rand_std"))
        summaries[which] = report.summary()
    run.writer.write_json("nullband.json", {"model": model, "replicates": run.replicates, "seed": run.args.seed,
                                            "k": run.args.swaps, **summaries}, "nullband")


def cmd_motifs(run: Run) -> None:
    sizes = (run.args.size,) if run.args.size else (2, 3)
    cfg = run.swap_config()
    report = motif_significance(run.graph, run.replicates, cfg, sizes, run.cfg["motifs"]["z_threshold"],
                                run.ddof, run.n_jobs, run.args.progress)
    run.writer.write_csv("motifs.csv", report.to_frame(), "motifs")
    run.writer.write_json("motifs.json", {
        "replicates": report.replicates, "seed": report.seed, "k": report.k, "model": report.model,
        "sizes": list(sizes), "z_threshold": report.z_threshold,
        "motifs": [m.man for m in report.motifs()],
        "antimotifs": [m.man for m in report.antimotifs()],
        "symmetry_fraction": symmetry_fraction(run.graph),
    }, "motifs")


def cmd_transitivity(run: Run) -> None:
    closure = run.args.closure
    records = outward_transitivity(run.graph, closure)
    run.writer.write_csv("transitivity.csv", transitivity_frame(records, run.names), "transitivity")
    corr, frame = transitivity_vs_out_degree(run.graph, records, run.cfg["degree_stats"]["method"])
    frame["category"] = [run.names[v] for v in frame["category"]]
    _write_frame_with_plot(run, "transitivity_vs_out.csv", frame, "transitivity",
                           PlotSpec("transitivity_vs_out.csv", "out_degree", ["T"], "outward transitivity",
                                    style="points"))
    defined = [r.T for r in records if r.T is not None]
    run.writer.write_json("transitivity.json", {
        "closure": closure,
        "defined": len(defined),
        "undefined": len(records) - len(defined),
        "mean_T": sum(defined) / len(defined) if defined else None,
        "out_degree_correlation": corr.to_dict(),
    }, "transitivity")


def cmd_persistence(run: Run) -> None:
    opts = run.cfg["persistence"]
    report = persistence_test(run.graph, run.replicates, run.swap_config(simple=False), opts["sigma"],
                              opts["log_base"], run.ddof, run.n_jobs, run.args.progress)
    for name, log_binned in (("persistence.csv", False), ("persistence_log.csv", True)):
        _write_frame_with_plot(run, name, report.rows(log_binned), "persistence",
                               PlotSpec(name, "multiplicity", ["data_count", "rand_mean"], "edge multiplicity",
                                        style="points", logscale="xy", errors="rand_std"))
    mass = ensemble_edge_mass(report.ensemble)
    run.writer.write_json("persistence.json", {
        "onset": report.onset, "sigma": report.sigma, "log_base": report.log_base,
        "replicates": run.replicates, "seed": run.args.seed, "k": run.args.swaps,
        "total_edges": report.data.total_edges,
        "edge_mass_conserved": all(m == report.data.total_edges for m in mass),
    }, "persistence")


def cmd_cluster(run: Run) -> None:
    opts = run.cfg["roles"]
    cap = run.args.cap_dendrograms or opts["cap"]
    dist = run.role_distances
    ds = ward_hca_all(dist, cap, opts["tie_eps"])
    run.writer.write_csv("cluster_stability.csv", cluster_stability(ds), "cluster")
    run.writer.write_text("dendrograms.nwk", "".join(to_newick(d) + "\n" for d in ds.dendrograms), "cluster")
    run.writer.write_json("dendrograms.json",
                          [{"index": i, "merges": to_merge_list(d)} for i, d in enumerate(ds.dendrograms)],
                          "cluster")
    run.writer.write_json("cluster.json", {
        **stability_summary(ds),
        "tie_eps": opts["tie_eps"],
        "empty_in": [dist.labels[v] for v in dist.empty_in],
        "empty_out": [dist.labels[v] for v in dist.empty_out],
    }, "cluster")


def cmd_curvature(run: Run) -> None:
    opts = run.cfg["curvature"]
    records = ollivier_all(run.graph)
    run.writer.write_csv("curvature.csv", curvature_frame(records, run.names), "curvature")
    hists = curvature_histograms(records, BinSpec(float(opts["forman_bin_width"])),
                                 BinSpec(float(opts["ollivier_bin_width"])), run.cfg["degree_stats"]["method"])
    for name, hist in (("forman_hist.csv", hists.forman), ("ollivier_hist.csv", hists.ollivier)):
        _write_frame_with_plot(run, name, hist.to_frame(), "curvature",
                               PlotSpec(name, "bin", ["count"], os.path.splitext(name)[0], style="boxes"))
    joint = hists.joint.copy()
    joint["source"] = [run.names[v] for v in joint["source"]]
    joint["target"] = [run.names[v] for v in joint["target"]]
    _write_frame_with_plot(run, "curvature_joint.csv", joint, "curvature",
                           PlotSpec("curvature_joint.csv", "forman", ["ollivier"], "Forman vs Ollivier",
                                    style="points"))
    run.writer.write_json("curvature.json", {
        "pairs": len(records),
        "ollivier_defined": len(hists.joint),
        "ollivier_undefined": hists.undefined,
        "forman_ollivier_correlation": hists.correlation.to_dict(),
        "forman_modes": count_modes(hists.forman),
        "ollivier_modes": count_modes(hists.ollivier),
    }, "curvature")


def cmd_embed_compare(run: Run) -> None:
    opts = run.cfg["embedding"]
    bins = run.args.bins or opts["bins"]
    emb = run.embeddings()
    sample = build_paired_sample(run.role_distances, emb, run.names, opts["stop_words"])
    run.writer.write_csv("embedding_pairs.csv", sample.frame, "embed-compare")
    report = compare(sample, bins, run.cfg["degree_stats"]["method"])
    resolution: Dict[str, int] = {}
    for how in sample.resolution.values():
        resolution[how] = resolution.get(how, 0) + 1
    run.writer.write_json("embedding.json", {**report.to_dict(), "resolution": resolution}, "embed-compare")


def cmd_report_all(run: Run) -> None:
    for name in ("ingest-check", "degrees", "nullband", "motifs", "transitivity", "persistence",
                 "cluster", "curvature"):
        COMMANDS[name](run)
    if run.args.embeddings:
        cmd_embed_compare(run)
    else:
        logger.info("No --embeddings given; skipping embed-compare")


COMMANDS: Dict[str, Callable[[Run], None]] = {
    "ingest-check": cmd_ingest_check,
    "degrees": cmd_degrees,
    "nullband": cmd_nullband,
    "motifs": cmd_motifs,
    "transitivity": cmd_transitivity,
    "persistence": cmd_persistence,
    "cluster": cmd_cluster,
    "curvature": cmd_curvature,
    "embed-compare": cmd_embed_compare,
    "report-all": cmd_report_all,
}


def build_parser() -> MetnetArgumentParser:
    common = MetnetArgumentParser(add_help=False)
    common.add_argument("--corpus", required=True, help="Mapping corpus CSV (word,source,target,first_year,last_year)")
    common.add_argument("--sizes", help="Category size table name,size (default: derived from the corpus)")
    common.add_argument("--embeddings", help="Word vectors, one 'key v1 ... vD' per line")
    common.add_argument("--dim", type=_positive_int, help="Embedding dimension (default: config)")
    common.add_argument("--out", required=True, help="Output directory")
    common.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
    common.add_argument("--replicates", type=_positive_int, help="Null-model replicates (default: config, 1000)")
    common.add_argument("--swaps", type=_non_negative_int, help="Attempted swaps per replicate (default: 10N)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--simple", dest="multi", action="store_false", help="Simple-graph swaps (default)")
    mode.add_argument("--multi", dest="multi", action="store_true", help="Multigraph swaps")
    common.set_defaults(multi=False)
    common.add_argument("--model", choices=list(MODELS) + ["config"], help="Null model for nullband (default: er)")
    common.add_argument("--size", type=int, choices=[2, 3], help="Motif size (default: both)")
    common.add_argument("--closure", choices=["return", "forward"], default="return",
                        help="Which edge closes a 2-path for transitivity (default: return)")
    common.add_argument("--bins", type=_positive_int, help="Equal-frequency bins for mutual information")
    common.add_argument("--cap-dendrograms", type=_positive_int, help="Maximum distinct dendrograms")
    common.add_argument("--threshold", type=int, help="Out-degree threshold for the subset correlation")
    common.add_argument("--config", help="Analysis config YAML (default: $METNET_CONFIG or analysis.yaml)")
    common.add_argument("--n-jobs", type=int, help="Parallel workers for ensembles (default: config)")
    common.add_argument("--gnuplot", action="store_true", help="Also write gnuplot scripts next to the CSVs")
    common.add_argument("--progress", action="store_true", help="Show progress bars for ensembles")
    common.add_argument("--timing", action="store_true", help="Record wall time in the manifest")
    common.add_argument("--log-level", help="Logging level (default: $LOG_LEVEL or INFO)")

    ap = MetnetArgumentParser(
        prog="metnet",
        description="Metaphor-mapping network analysis",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Exit codes: 0 ok, 1 usage, 2 input error, 3 internal error.",
    )
    sub = ap.add_subparsers(dest="command", metavar="subcommand", parser_class=MetnetArgumentParser)
    sub.required = True
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", "").replace("_", " "))
    return ap


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"out", "log_level", "progress", "timing", "n_jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:      # --help
        return int(e.code or 0)

    setup_logging(args.log_level, os.getenv("LOG_FILE"))
    t0 = time.time()
    try:
        cfg = load_config(args.config)
    except INPUT_ERRORS as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT

    writer = ReportWriter(args.out, RunManifest(args.command, args.seed, _flags(args), cfg))
    run = Run(args, cfg, writer)
    try:
        if cfg.get("_source"):
            writer.manifest.record_input(cfg["_source"])
        COMMANDS[args.command](run)
        if args.timing:
            writer.manifest.wall_time_s = round(time.time() - t0, 3)
        writer.write_manifest()
    except UsageError as e:
        writer.cleanup()
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as e:
        writer.cleanup()
        print(f"❌ input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:
        writer.cleanup()
        logger.exception(f"{args.command} failed")
        print(f"❌ internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL

    print(f"✅ {args.command}: {len(writer.written)} files in {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
