from __future__ import annotations

import os
from typing import Mapping

import pandas as pd

STAGE_COLUMNS = ["run_id", "stage", "elapsed_ms", "items"]


class TelemetryLogger:
    """Append-only CSV sink for per-stage timings (`stages.csv` under base_dir)."""

    def __init__(self, base_dir: str):
        self.base_dir = base_dir
        os.makedirs(base_dir, exist_ok=True)

    def _append(self, name: str, df: pd.DataFrame) -> str:
        path = os.path.join(self.base_dir, f"{name}.csv")
        df.to_csv(path, mode="a", header=not os.path.exists(path), index=False, lineterminator="\n")
        return path

    def log_stages(self, run_id: str, timings: Mapping[str, float], items: Mapping[str, int] | None = None) -> str:
        items = items or {}
        rows = [(run_id, stage, round(float(ms), 3), int(items.get(stage, 0))) for stage, ms in timings.items()]
        return self._append("stages", pd.DataFrame(rows, columns=STAGE_COLUMNS))
