from .cluster import Partition, brute_force_partition, detect_subnets, modularity
from .graph import (
    CitationNetwork,
    build_network,
    chronology_violations,
    component_histogram,
    hierarchical_layering,
    largest_component,
    layered_order,
)
from .matching import MatchKey, build_match_index, load_journal_synonyms, match_reference
from .selection import SelectionConfig, SelectionResult, TiePolicy, citation_coverage, select_top_cited

__all__ = [
    "CitationNetwork",
    "MatchKey",
    "Partition",
    "SelectionConfig",
    "SelectionResult",
    "TiePolicy",
    "brute_force_partition",
    "build_match_index",
    "build_network",
    "chronology_violations",
    "citation_coverage",
    "component_histogram",
    "detect_subnets",
    "hierarchical_layering",
    "largest_component",
    "layered_order",
    "load_journal_synonyms",
    "match_reference",
    "modularity",
    "select_top_cited",
]
