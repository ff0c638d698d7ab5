from __future__ import annotations

import logging
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import artifacts as A
from .config import PipelineConfig
from .corpus.ingest import ingest_files
from .corpus.jsonio import serialize_corpus
from .corpus.models import BibRecord
from .corpus.query import apply_query_filter, load_query
from .errors import EmptyCorpus, MissingYear, StageError, TransmapError
from .manifest import RunManifest, config_snapshot, digest_bytes
from .network.cluster import Partition, detect_subnets, partition_to_json
from .network.graph import CitationNetwork, build_network, hierarchical_layering, largest_component, network_to_json
from .network.matching import load_journal_synonyms
from .network.selection import (
    SelectionConfig,
    SelectionResult,
    TiePolicy,
    select_records,
    select_top_cited,
    selection_to_json,
)
from .report.colors import score_documents
from .report.export import ExportFormat, export_graph
from .report.leaderboard import load_country_synonyms, load_institution_synonyms
from .report.render import clustered_network, render_report
from .semantic.annotate import Annotation, annotate_corpus, annotations_to_json
from .semantic.vocabulary import VocabularyIndex, load_clinical_prefixes, load_vocabulary
from .telemetry.logger import TelemetryLogger

logger = logging.getLogger(__name__)

STAGES = ("ingest", "select", "graph", "cluster", "annotate", "report")


@dataclass
class StageClock:
    timings: Dict[str, float] = field(default_factory=dict)
    items: Dict[str, int] = field(default_factory=dict)

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time a stage and wrap any failure in StageError naming it."""
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except TransmapError as e:
            raise StageError(name, e) from e
        except (OSError, KeyError, ValueError) as e:
            raise StageError(name, e) from e
        finally:
            self.timings[name] = (time.perf_counter() - t0) * 1000.0


# Stage functions: objects in, objects out. The CLI and run_pipeline add file IO.

def ingest_stage(paths: Sequence[str], cfg: PipelineConfig) -> List[BibRecord]:
    records = ingest_files(paths, cfg.ingest.format, workers=cfg.ingest.workers)
    if cfg.ingest.query:
        query = load_query(cfg.ingest.query)
        records = apply_query_filter(records, query)
    if not records:
        raise EmptyCorpus("no records left after ingest and query filtering")
    return records


def select_stage(corpus: Sequence[BibRecord], cfg: PipelineConfig) -> SelectionResult:
    s = cfg.selection
    return select_top_cited(corpus, SelectionConfig(s.fraction, s.min_coverage, TiePolicy(s.tie_policy)))


def graph_stage(corpus: Sequence[BibRecord], selection: SelectionResult, cfg: PipelineConfig) -> CitationNetwork:
    synonyms = load_journal_synonyms(cfg.matching.journal_synonyms)
    return build_network(select_records(corpus, selection), synonyms)


def cluster_stage(net: CitationNetwork, cfg: PipelineConfig) -> Tuple[CitationNetwork, Partition]:
    """Partition the largest component (or the whole network).

    A component without edges gets one cluster per node and no modularity.
    """
    target = largest_component(net) if cfg.graph.largest_component_only else net
    if target.edge_count == 0:
        logger.warning("no citations resolved; writing a singleton partition")
        return target, Partition.singletons(target.nodes)
    c = cfg.cluster
    return target, detect_subnets(target, seed=c.seed, resolution=c.resolution, restarts=c.restarts)


def load_vocab(cfg: PipelineConfig) -> VocabularyIndex:
    prefixes = load_clinical_prefixes(cfg.annotate.prefixes)
    return load_vocabulary(cfg.annotate.vocab, prefixes)


def annotate_stage(corpus: Sequence[BibRecord], cfg: PipelineConfig, vocab: Optional[VocabularyIndex] = None) -> Dict[str, Annotation]:
    vocab = vocab or load_vocab(cfg)
    return annotate_corpus(corpus, vocab, workers=cfg.annotate.workers)


def report_stage(run_dir: str, cfg: PipelineConfig, out_path: Optional[str] = None, vocab: Optional[VocabularyIndex] = None) -> List[str]:
    """Render report.md, its CSV sidecars and the graph exports; returns written paths."""
    art = A.RunArtifacts.load(run_dir)
    out_path = out_path or os.path.join(run_dir, A.REPORT)
    out_dir = os.path.dirname(os.path.abspath(out_path))
    vocab = vocab or load_vocab(cfg)
    labels = {tid: t.preferred_label for tid, t in vocab.terms.items()}
    sub = clustered_network(art)
    scores = score_documents({n: art.annotations[n] for n in sub.nodes if n in art.annotations}, cfg.annotate.count)
    report = render_report(
        art,
        cfg.report,
        labels=labels,
        institutions=load_institution_synonyms(cfg.report.institution_synonyms),
        countries=load_country_synonyms(cfg.report.country_synonyms),
        count=cfg.annotate.count,
        scores=scores,
    )
    written = report.write(out_path)
    try:
        layering = hierarchical_layering(sub)
    except MissingYear as e:
        logger.warning("exporting without layers: %s", e)
        layering = None
    for name in cfg.report.formats:
        fmt = ExportFormat.parse(name)
        path = os.path.join(out_dir, A.EXPORT_STEM + fmt.suffix)
        written.append(A.write_artifact(out_dir, os.path.basename(path), export_graph(sub, scores, art.partition, layering, fmt)))
    return written


def run_pipeline(cfg: PipelineConfig, inputs: Sequence[str], out_dir: str) -> RunManifest:
    """Run every stage into `out_dir` and write manifest.json last."""
    clock = StageClock()
    manifest = RunManifest(config=config_snapshot(cfg))
    manifest.clinical_categories = load_clinical_prefixes(cfg.annotate.prefixes)

    with clock.stage("ingest"):
        corpus = ingest_stage(inputs, cfg)
        manifest.add_inputs(inputs)
        A.write_artifact(out_dir, A.CORPUS, serialize_corpus(corpus))
        clock.items["ingest"] = len(corpus)
    with clock.stage("select"):
        selection = select_stage(corpus, cfg)
        A.write_artifact(out_dir, A.SELECTION, selection_to_json(selection))
        clock.items["select"] = selection.selected_count
    with clock.stage("graph"):
        net = graph_stage(corpus, selection, cfg)
        A.write_artifact(out_dir, A.NETWORK, network_to_json(net))
        clock.items["graph"] = net.edge_count
    with clock.stage("cluster"):
        _, partition = cluster_stage(net, cfg)
        A.write_artifact(out_dir, A.PARTITION, partition_to_json(partition))
        clock.items["cluster"] = partition.cluster_count
    with clock.stage("annotate"):
        vocab = load_vocab(cfg)
        annotations = annotate_stage(corpus, cfg, vocab)
        A.write_artifact(out_dir, A.ANNOTATIONS, annotations_to_json(annotations))
        clock.items["annotate"] = len(annotations)
    with clock.stage("report"):
        written = report_stage(out_dir, cfg, vocab=vocab)
        clock.items["report"] = len(written)

    manifest.stage_timings = dict(clock.timings)
    manifest.add_outputs(out_dir, A.existing_outputs(out_dir))
    A.write_artifact(out_dir, A.MANIFEST, manifest.to_json())
    if cfg.telemetry.dir:
        run_id = digest_bytes(repr((sorted(manifest.inputs.items()), sorted(manifest.outputs.items()))).encode("utf-8"))[:12]
        TelemetryLogger(cfg.telemetry.dir).log_stages(run_id, clock.timings, clock.items)
    logger.info("run complete: %s", out_dir)
    return manifest
