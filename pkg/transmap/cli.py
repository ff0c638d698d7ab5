from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from . import artifacts as A
from .config import PipelineConfig, load_config_typed
from .corpus.ingest import parse_file
from .corpus.jsonio import serialize_corpus
from .errors import EXIT_OK, MissingInputFile, StageError, TransmapError
from .log import configure_logging
from .network.cluster import partition_to_json
from .network.graph import component_histogram, network_to_json
from .network.selection import selection_to_json
from .pipeline import annotate_stage, cluster_stage, graph_stage, ingest_stage, report_stage, run_pipeline, select_stage
from .report.render import pct
from .semantic.annotate import annotations_to_json


def _read(path: str) -> bytes:
    if not os.path.exists(path):
        raise MissingInputFile(path)
    with open(path, "rb") as f:
        return f.read()


def _write(path: str, data: bytes) -> None:
    A.write_artifact(os.path.dirname(os.path.abspath(path)), os.path.basename(path), data)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """CLI flags that were given, as a nested config mapping."""
    table = {
        "format": ("ingest", "format"),
        "query": ("ingest", "query"),
        "workers": ("ingest", "workers"),
        "fraction": ("selection", "fraction"),
        "min_coverage": ("selection", "min_coverage"),
        "ties": ("selection", "tie_policy"),
        "journal_synonyms": ("matching", "journal_synonyms"),
        "seed": ("cluster", "seed"),
        "resolution": ("cluster", "resolution"),
        "restarts": ("cluster", "restarts"),
        "all_components": ("graph", "largest_component_only"),
        "vocab": ("annotate", "vocab"),
        "prefixes": ("annotate", "prefixes"),
        "count": ("annotate", "count"),
        "formats": ("report", "formats"),
        "telemetry_dir": ("telemetry", "dir"),
    }
    out: Dict[str, Any] = {}
    for attr, (section, key) in table.items():
        value = getattr(args, attr, None)
        if value is None:
            continue
        if attr == "all_components":
            value = not value
        out.setdefault(section, {})[key] = value
    return out


def _config(args: argparse.Namespace) -> PipelineConfig:
    return load_config_typed(args.config, _overrides(args))


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = ingest_stage(args.inputs, cfg)
    _write(args.output, serialize_corpus(corpus))
    print(f"Ingested {len(corpus)} record(s) -> {args.output}")
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = parse_file(args.corpus, "json")
    result = select_stage(corpus, cfg)
    _write(args.output, selection_to_json(result))
    share = result.selected_count / result.corpus_size if result.corpus_size else 0.0
    print("Selection summary:")
    print(f"  {result.selected_count} ({pct(share)}) selected; coverage {pct(result.coverage)}")
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = parse_file(args.corpus, "json")
    selection = A.load_selection(_read(args.selection), args.selection)
    net = graph_stage(corpus, selection, cfg)
    _write(args.output, network_to_json(net))
    if args.report:
        component_histogram(net).to_csv(args.report, index=False, lineterminator="\n")
    print(f"Network: {len(net.nodes)} nodes, {net.edge_count} edges, {net.ambiguous_refs} ambiguous refs")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _config(args)
    net = A.load_network(_read(args.network), args.network)
    component, partition = cluster_stage(net, cfg)
    _write(args.output, partition_to_json(partition))
    q = "undefined" if partition.modularity is None else f"{partition.modularity:.4f}"
    print(f"Subnets: {partition.cluster_count} over {len(component.nodes)} nodes, Q={q}")
    return EXIT_OK


def cmd_annotate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    corpus = parse_file(args.corpus, "json")
    annotations = annotate_stage(corpus, cfg)
    _write(args.output, annotations_to_json(annotations))
    tagged = sum(1 for a in annotations.values() if not a.is_empty)
    print(f"Annotated {tagged} of {len(annotations)} document(s)")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if not os.path.isdir(args.run_dir):
        raise MissingInputFile(args.run_dir)
    written = report_stage(args.run_dir, cfg, out_path=args.output)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _config(args)
    manifest = run_pipeline(cfg, args.inputs, args.output)
    print(f"Run written to {args.output}")
    for name, digest in manifest.outputs.items():
        print(f"  {name} {digest[:16]}")
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="YAML config file (default: configs/pipeline.yaml if present)")
    p.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-v info, -vv debug)")


def _ingest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["wos", "json"], help="Input format")
    p.add_argument("--query", help="Query YAML file applied after parsing")
    p.add_argument("--workers", type=int, help="Parser threads for multi-file input")


def _select_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fraction", type=float, help="Share of the corpus to select (0, 1]")
    p.add_argument("--min-coverage", dest="min_coverage", type=float, help="Coverage below this only warns")
    p.add_argument("--ties", choices=["include", "truncate"], help="Tie policy at the cut-off count")


def _cluster_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="Optimizer seed")
    p.add_argument("--resolution", type=float, help="Modularity resolution")
    p.add_argument("--restarts", type=int, help="Optimizer restarts")
    p.add_argument("--all-components", dest="all_components", action="store_true", default=None,
                   help="Cluster the whole network instead of its largest component")


def _annotate_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vocab", help="Vocabulary TSV (default: bundled)")
    p.add_argument("--prefixes", help="Clinical prefix list (default: bundled)")
    p.add_argument("--count", choices=["unique", "occurrences"], help="Ratio counting mode")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="transmap", description="Knowledge-translation maps from bibliographic exports")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="Parse exports into corpus.json")
    _common(p)
    _ingest_flags(p)
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("select", help="Select the top-cited share of a corpus")
    _common(p)
    _select_flags(p)
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("graph", help="Build the citation network among selected records")
    _common(p)
    p.add_argument("--journal-synonyms", dest="journal_synonyms", help="Journal synonym YAML")
    p.add_argument("--report", help="Write the component size histogram to this CSV")
    p.add_argument("corpus")
    p.add_argument("selection")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("cluster", help="Partition the network into subnetworks")
    _common(p)
    _cluster_flags(p)
    p.add_argument("network")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("annotate", help="Tag documents with vocabulary terms")
    _common(p)
    _annotate_flags(p)
    p.add_argument("--workers", type=int, help="Annotation threads")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("report", help="Render report.md, CSV tables and graph exports from a run directory")
    _common(p)
    p.add_argument("--vocab", help="Vocabulary TSV used for term labels")
    p.add_argument("--count", choices=["unique", "occurrences"], help="Ratio counting mode")
    p.add_argument("--formats", nargs="+", choices=["graphml", "dot", "json", "pajek"], help="Graph export formats")
    p.add_argument("run_dir")
    p.add_argument("-o", "--output", help="Report path (default: <run_dir>/report.md)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="Run every stage into one directory")
    _common(p)
    _ingest_flags(p)
    _select_flags(p)
    _cluster_flags(p)
    _annotate_flags(p)
    p.add_argument("--formats", nargs="+", choices=["graphml", "dot", "json", "pajek"], help="Graph export formats")
    p.add_argument("--telemetry-dir", dest="telemetry_dir", help="Append stage timings to <dir>/stages.csv")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="Run directory")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except StageError as e:
        print(f"transmap {args.command}: stage '{e.stage}' failed: {e.cause}", file=sys.stderr)
        return e.exit_code
    except TransmapError as e:
        print(f"transmap {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
