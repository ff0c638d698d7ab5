from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from ..errors import OutOfRange
from ..semantic.annotate import Annotation, clinical_ratio

RGB = Tuple[int, int, int]

BASIC_RGB: RGB = (255, 0, 0)
CLINICAL_RGB: RGB = (0, 0, 255)
UNSCORED_RGB: RGB = (128, 128, 128)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def color_for_ratio(r: Optional[float]) -> RGB:
    """Linear red (basic) to blue (clinical); gray when the ratio is undefined."""
    if r is None:
        return UNSCORED_RGB
    if not 0.0 <= r <= 1.0 or math.isnan(r):
        raise OutOfRange(f"clinical ratio must be in [0, 1], got {r}")
    return (
        _round_half_up(BASIC_RGB[0] * (1.0 - r) + CLINICAL_RGB[0] * r),
        0,
        _round_half_up(BASIC_RGB[2] * (1.0 - r) + CLINICAL_RGB[2] * r),
    )


def hex_color(rgb: RGB) -> str:
    return "#{:02X}{:02X}{:02X}".format(*rgb)


@dataclass(frozen=True)
class ClinicalScore:
    record_id: str
    ratio: Optional[float]
    color: RGB

    @property
    def hex(self) -> str:
        return hex_color(self.color)


def score_documents(annotations: Mapping[str, Annotation], count: str = "unique") -> Dict[str, ClinicalScore]:
    out = {}
    for rid in sorted(annotations):
        ratio = clinical_ratio(annotations[rid], count)
        out[rid] = ClinicalScore(rid, ratio, color_for_ratio(ratio))
    return out
