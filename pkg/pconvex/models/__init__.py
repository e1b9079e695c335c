"""
Pydantic models for files crossing the process boundary.
"""

from .files import BodyFile, CombinationFile, MapFile, TermModel, read_json, write_json
from .reports import (
    AxiomReport,
    Lemma7Report,
    RunManifest,
    SandwichReport,
    ScalingRow,
    VolumeEstimate
)

__all__ = [
    "BodyFile",
    "CombinationFile",
    "MapFile",
    "TermModel",
    "read_json",
    "write_json",
    "AxiomReport",
    "Lemma7Report",
    "RunManifest",
    "SandwichReport",
    "ScalingRow",
    "VolumeEstimate"
]
