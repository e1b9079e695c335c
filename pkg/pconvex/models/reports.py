"""
Pydantic models for experiment reports, table rows and run manifests.
"""

from typing import Any, ClassVar, Dict, List, Optional

from pydantic import BaseModel, Field

from pconvex import __version__


class AxiomReport(BaseModel):
    """Outcome of sampling the p-norm axioms on one space."""

    samples: int
    seed: int
    p: float
    positivity_violations: int = 0
    homogeneity_violations: int = 0
    triangle_violations: int = 0
    worst_homogeneity_error: float = Field(0.0, description="max relative |g(ax) - |a|g(x)|")
    worst_triangle_margin: float = Field(
        0.0, description="max of g(x+y)^p - g(x)^p - g(y)^p, relative to the right side")

    @property
    def violations(self) -> int:
        return self.positivity_violations + self.homogeneity_violations + self.triangle_violations

    @property
    def passed(self) -> bool:
        return self.violations == 0


class SandwichReport(BaseModel):
    """Empirical check of ||x||_{X^q} <= ||x||_X <= n^(1/p-1/q) ||x||_{X^q}."""

    samples: int
    seed: int
    n: int
    p: float
    q: float
    bound: float
    max_ratio: float = Field(..., description="max ||x||_X / ||x||_{X^q}; lower estimate of d(X, X^q)")
    lower_violations: int = 0
    upper_violations: int = 0

    @property
    def violations(self) -> int:
        return self.lower_violations + self.upper_violations


class VolumeEstimate(BaseModel):
    """Monte Carlo estimate of a Lebesgue volume."""

    mean: float = Field(..., ge=0.0)
    std_error: float = Field(..., ge=0.0)
    samples: int = Field(..., ge=1)
    hits: int = Field(..., ge=0)

    @property
    def hit_fraction(self) -> float:
        return self.hits / self.samples


class Lemma7Report(BaseModel):
    """Probability that T maps n random sphere points into a small multiple of a fixed body."""

    n: int
    p: float
    t: float
    threshold: float = Field(..., description="2^(1/p) t")
    trials: int
    hits: int
    empirical_probability: float
    std_error: float
    volume: VolumeEstimate
    ball_volume: float
    bound: float
    vacuous: bool
    consistent: bool


class ScalingRow(BaseModel):
    """One (A, A') pair of the diameter study."""

    CSV_COLUMNS: ClassVar[List[str]] = [
        "n", "p", "pair", "distance_upper", "reference",
        "envelope_ratio_x", "envelope_ratio_y",
        "envelope_q", "envelope_distance_upper", "envelope_reference",
    ]

    n: int
    p: float
    pair: int
    distance_upper: float = Field(..., ge=1.0)
    reference: float
    envelope_ratio_x: float
    envelope_ratio_y: float
    envelope_q: Optional[float] = None
    envelope_distance_upper: Optional[float] = None
    envelope_reference: Optional[float] = None


class RunManifest(BaseModel):
    """Accompanies every output file: what was run, with which parameters."""

    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    version: str = __version__
    run_id: str
    timestamp: str
    outputs: List[str] = Field(default_factory=list)
