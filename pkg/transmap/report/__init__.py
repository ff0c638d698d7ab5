from .colors import ClinicalScore, color_for_ratio, hex_color, score_documents
from .export import ExportFormat, export_graph, shape_for_cluster
from .leaderboard import Leaderboard, LeaderRow, country_distribution, institution_leaderboard
from .profiles import ClusterProfile, band_for_ratio, cluster_profiles
from .render import Report, render_report

__all__ = [
    "ClinicalScore",
    "ClusterProfile",
    "ExportFormat",
    "LeaderRow",
    "Leaderboard",
    "Report",
    "band_for_ratio",
    "cluster_profiles",
    "color_for_ratio",
    "country_distribution",
    "export_graph",
    "hex_color",
    "institution_leaderboard",
    "render_report",
    "score_documents",
    "shape_for_cluster",
]
