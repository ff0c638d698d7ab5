from __future__ import annotations

import copy
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import yaml

from .errors import ConfigParseError


DEFAULT_CONFIG_PATH = 'configs/pipeline.yaml'

DEFAULTS = {
    'ingest': {'format': 'wos', 'query': None, 'workers': 1},
    'selection': {'fraction': 0.2, 'min_coverage': 0.6, 'tie_policy': 'include'},
    'matching': {'journal_synonyms': None},
    'graph': {'largest_component_only': True},
    'cluster': {'seed': 42, 'resolution': 1.0, 'restarts': 10},
    'annotate': {'vocab': None, 'prefixes': None, 'count': 'unique', 'workers': 1},
    'report': {
        'basic_below': 0.33,
        'clinical_above': 0.66,
        'shared_cluster_fraction': 0.8,
        'institution_synonyms': None,
        'country_synonyms': None,
        'formats': ['graphml', 'dot', 'json'],
        'top_institutions': 10,
    },
    'telemetry': {'dir': None},
}

FORMATS = ('wos', 'json')
TIE_POLICIES = ('include', 'truncate')
COUNT_MODES = ('unique', 'occurrences')
EXPORT_FORMATS = ('graphml', 'dot', 'json', 'pajek')
DEFAULT_EXPORT_FORMATS = ('graphml', 'dot', 'json')
# keys holding file paths, resolved against the config file's directory
PATH_KEYS = (
    ('ingest', 'query'),
    ('matching', 'journal_synonyms'),
    ('annotate', 'vocab'),
    ('annotate', 'prefixes'),
    ('report', 'institution_synonyms'),
    ('report', 'country_synonyms'),
    ('telemetry', 'dir'),
)


def load_yaml(path: str, required: bool = False) -> Dict[str, Any]:
    if not os.path.exists(path):
        if required:
            raise ConfigParseError(f'{path}: config file not found')
        return {}
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigParseError(f'{path}: {e}') from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigParseError(f'{path}: top level must be a mapping')
    return data


def merge_dict(a: Dict[str, Any], b: Mapping[str, Any]) -> Dict[str, Any]:
    out = dict(a)
    for k, v in b.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge_dict(out[k], v)
        else:
            out[k] = v
    return out


def _resolve_paths(cfg: Dict[str, Any], base_dir: str) -> Dict[str, Any]:
    for section, key in PATH_KEYS:
        value = cfg.get(section, {}).get(key)
        if isinstance(value, str) and value and not os.path.isabs(value):
            cfg[section][key] = os.path.normpath(os.path.join(base_dir, value))
    return cfg


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """DEFAULTS <- YAML file <- overrides. An explicit path must exist."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is None:
        path, required = DEFAULT_CONFIG_PATH, False
    else:
        required = True
    file_cfg = load_yaml(path, required=required)
    for section, body in file_cfg.items():
        if section not in DEFAULTS:
            raise ConfigParseError(f'{path}: unknown section {section!r}')
        if not isinstance(body, dict):
            raise ConfigParseError(f'{path}: section {section!r} must be a mapping')
    cfg = merge_dict(cfg, file_cfg)
    cfg = _resolve_paths(cfg, os.path.dirname(os.path.abspath(path)))
    if overrides:
        cfg = merge_dict(cfg, overrides)
    return cfg


# Typed config wrappers
@dataclass
class IngestSettings:
    format: str = 'wos'
    query: Optional[Any] = None
    workers: int = 1


@dataclass
class SelectionSettings:
    fraction: float = 0.2
    min_coverage: float = 0.6
    tie_policy: str = 'include'


@dataclass
class MatchingSettings:
    journal_synonyms: Optional[str] = None


@dataclass
class GraphSettings:
    largest_component_only: bool = True


@dataclass
class ClusterSettings:
    seed: int = 42
    resolution: float = 1.0
    restarts: int = 10


@dataclass
class AnnotateSettings:
    vocab: Optional[str] = None
    prefixes: Optional[str] = None
    count: str = 'unique'
    workers: int = 1


@dataclass
class ReportSettings:
    basic_below: float = 0.33
    clinical_above: float = 0.66
    shared_cluster_fraction: float = 0.8
    institution_synonyms: Optional[str] = None
    country_synonyms: Optional[str] = None
    formats: List[str] = field(default_factory=lambda: list(DEFAULT_EXPORT_FORMATS))
    top_institutions: int = 10


@dataclass
class TelemetrySettings:
    dir: Optional[str] = None


@dataclass
class PipelineConfig:
    ingest: IngestSettings = field(default_factory=IngestSettings)
    selection: SelectionSettings = field(default_factory=SelectionSettings)
    matching: MatchingSettings = field(default_factory=MatchingSettings)
    graph: GraphSettings = field(default_factory=GraphSettings)
    cluster: ClusterSettings = field(default_factory=ClusterSettings)
    annotate: AnnotateSettings = field(default_factory=AnnotateSettings)
    report: ReportSettings = field(default_factory=ReportSettings)
    telemetry: TelemetrySettings = field(default_factory=TelemetrySettings)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _get(d: Dict[str, Any], key: str, default):
    return d.get(key, default)


def _num(section: str, key: str, value: Any, kind=float):
    if isinstance(value, bool):
        raise ConfigParseError(f'{section}.{key}: expected a number, got {value!r}')
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigParseError(f'{section}.{key}: expected a number, got {value!r}') from None


def _choice(section: str, key: str, value: Any, allowed) -> str:
    value = str(value).lower()
    if value not in allowed:
        raise ConfigParseError(f'{section}.{key}: {value!r} is not one of {", ".join(allowed)}')
    return value


def validate_config(cfg: PipelineConfig) -> PipelineConfig:
    s = cfg.selection
    if not 0.0 < s.fraction <= 1.0:
        raise ConfigParseError(f'selection.fraction must be in (0, 1], got {s.fraction}')
    if not 0.0 <= s.min_coverage <= 1.0:
        raise ConfigParseError(f'selection.min_coverage must be in [0, 1], got {s.min_coverage}')
    if cfg.cluster.resolution <= 0:
        raise ConfigParseError(f'cluster.resolution must be positive, got {cfg.cluster.resolution}')
    if cfg.cluster.restarts < 1:
        raise ConfigParseError(f'cluster.restarts must be at least 1, got {cfg.cluster.restarts}')
    r = cfg.report
    if not 0.0 <= r.basic_below <= r.clinical_above <= 1.0:
        raise ConfigParseError('report bands need 0 <= basic_below <= clinical_above <= 1')
    if not 0.0 < r.shared_cluster_fraction <= 1.0:
        raise ConfigParseError(f'report.shared_cluster_fraction must be in (0, 1], got {r.shared_cluster_fraction}')
    if cfg.ingest.workers < 1 or cfg.annotate.workers < 1:
        raise ConfigParseError('workers must be at least 1')
    return cfg


def load_config_typed(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    raw = load_config(path, overrides)
    ing, sel, mat = raw['ingest'], raw['selection'], raw['matching']
    gr, cl, an, rep, tel = raw['graph'], raw['cluster'], raw['annotate'], raw['report'], raw['telemetry']
    formats = _get(rep, 'formats', list(DEFAULT_EXPORT_FORMATS))
    if isinstance(formats, str):
        formats = [formats]
    cfg = PipelineConfig(
        ingest=IngestSettings(
            format=_choice('ingest', 'format', _get(ing, 'format', 'wos'), FORMATS),
            query=_get(ing, 'query', None),
            workers=_num('ingest', 'workers', _get(ing, 'workers', 1), int),
        ),
        selection=SelectionSettings(
            fraction=_num('selection', 'fraction', _get(sel, 'fraction', 0.2)),
            min_coverage=_num('selection', 'min_coverage', _get(sel, 'min_coverage', 0.6)),
            tie_policy=_choice('selection', 'tie_policy', _get(sel, 'tie_policy', 'include'), TIE_POLICIES),
        ),
        matching=MatchingSettings(journal_synonyms=_get(mat, 'journal_synonyms', None)),
        graph=GraphSettings(largest_component_only=bool(_get(gr, 'largest_component_only', True))),
        cluster=ClusterSettings(
            seed=_num('cluster', 'seed', _get(cl, 'seed', 42), int),
            resolution=_num('cluster', 'resolution', _get(cl, 'resolution', 1.0)),
            restarts=_num('cluster', 'restarts', _get(cl, 'restarts', 10), int),
        ),
        annotate=AnnotateSettings(
            vocab=_get(an, 'vocab', None),
            prefixes=_get(an, 'prefixes', None),
            count=_choice('annotate', 'count', _get(an, 'count', 'unique'), COUNT_MODES),
            workers=_num('annotate', 'workers', _get(an, 'workers', 1), int),
        ),
        report=ReportSettings(
            basic_below=_num('report', 'basic_below', _get(rep, 'basic_below', 0.33)),
            clinical_above=_num('report', 'clinical_above', _get(rep, 'clinical_above', 0.66)),
            shared_cluster_fraction=_num('report', 'shared_cluster_fraction', _get(rep, 'shared_cluster_fraction', 0.8)),
            institution_synonyms=_get(rep, 'institution_synonyms', None),
            country_synonyms=_get(rep, 'country_synonyms', None),
            formats=[_choice('report', 'formats', f, EXPORT_FORMATS) for f in formats],
            top_institutions=_num('report', 'top_institutions', _get(rep, 'top_institutions', 10), int),
        ),
        telemetry=TelemetrySettings(dir=_get(tel, 'dir', None)),
    )
    return validate_config(cfg)
