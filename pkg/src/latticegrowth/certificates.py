"""Growth bounds carrying the evidence that produced them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .stepset import StepSet, format_stepset

KINDS = ("upper", "lower", "exact")
TAGS = (
    "angle",
    "normal",
    "partition",
    "rotation",
    "excursion",
    "half-plane",
    "fr-formula",
    "enumeration-floor",
)


@dataclass(frozen=True)
class GrowthBound:
    """A numeric bound on K_S.

    ``tag`` names the certificate family (see TAGS); ``detail`` is a human-readable
    derivation; ``data`` keeps machine-readable pieces (angles, partitions, ...).
    """

    value: float
    kind: str
    tag: str
    detail: str
    model: StepSet
    data: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}")
        if self.tag not in TAGS:
            raise ValueError(f"unknown certificate tag {self.tag!r}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "certificate": {"tag": self.tag, "detail": self.detail},
            "model": format_stepset(self.model),
        }
