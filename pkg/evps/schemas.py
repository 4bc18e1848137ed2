# Pydantic Schemas

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi

SweepFamily = Literal["k_sweep", "n_sweep", "loss_sweep", "r_sweep"]
RowStatus = Literal["ok", "undefined-gain", "unavailable", "no-photon"]


# ============ Gate Parameter Schemas ============
class SqueezeParam(BaseModel):
    """Squeezing parameter zeta = r * exp(i theta)."""

    r: float
    theta: float = 0.0

    model_config = ConfigDict(frozen=True)

    @field_validator("r")
    @classmethod
    def _finite_r(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("squeezing magnitude must be finite")
        return v

    @field_validator("theta")
    @classmethod
    def _wrap_theta(cls, v: float) -> float:
        wrapped = math.fmod(v, TWO_PI)
        if wrapped < 0:
            wrapped += TWO_PI
        # fmod can land exactly on 2*pi after the shift
        return 0.0 if wrapped >= TWO_PI else wrapped

    @property
    def zeta(self) -> complex:
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))


class LossSpec(BaseModel):
    """Uniform beam-splitter loss on a set of modes."""

    l: float
    applies_to: Tuple[int, ...]

    model_config = ConfigDict(frozen=True)

    @property
    def theta(self) -> float:
        """Loss angle with l = sin^2(theta), theta in [0, pi/2]."""
        return math.asin(math.sqrt(min(max(self.l, 0.0), 1.0)))


# ============ State Family Schemas ============
class GhzParams(BaseModel):
    """
    (N, r, k) parametrisation of the multi-source GHZ family.

    The squeezing in the first input is r1 = r/(k+1) and in the remaining
    inputs r2 = k r/(k+1), so that r1 + r2 = r; k = 0 is the single-source
    family.
    """

    N: int = Field(ge=1)
    r: float
    k: float = Field(default=0.0, ge=0.0)

    model_config = ConfigDict(frozen=True)

    @field_validator("r", "k")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def r1(self) -> float:
        return self.r / (self.k + 1.0)

    @property
    def r2(self) -> float:
        return self.k * self.r / (self.k + 1.0)

    @property
    def local_squeezing(self) -> float:
        """Magnitude kr/(k+1) of the local squeezers linking the family to psi0(N, -r)."""
        return self.r2

    @classmethod
    def from_sources(cls, N: int, r1: float, r2: float) -> "GhzParams":
        """Build from the per-source squeezing values."""
        if r1 <= 0:
            raise ValueError("r1 must be positive to define the ratio k")
        return cls(N=N, r=r1 + r2, k=r2 / r1)

    def with_k(self, k: float) -> "GhzParams":
        return GhzParams(N=self.N, r=self.r, k=k)

    def with_r(self, r: float) -> "GhzParams":
        return GhzParams(N=self.N, r=r, k=self.k)

    def with_modes(self, N: int) -> "GhzParams":
        return GhzParams(N=N, r=self.r, k=self.k)


class CompositeGrouping(BaseModel):
    """
    Partition of N physical modes into composite modes A | B | C | D.

    A is the subtracted mode and is always its own composite. Counts
    exclude A: n modes share A's group (B), m modes form C and p modes
    form D, so N = n + m + p + 1. Empty groups are omitted from the
    composite space.
    """

    n: int = Field(default=0, ge=0)
    m: int = Field(ge=1)
    p: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def N(self) -> int:
        return self.n + self.m + self.p + 1

    @property
    def labels(self) -> Tuple[str, ...]:
        """Labels of the non-empty composites, in tensor order."""
        return tuple(label for label, count in self.counts().items() if count > 0)

    def counts(self) -> Dict[str, int]:
        return {"A": 1, "B": self.n, "C": self.m, "D": self.p}

    def weights(self) -> Dict[str, float]:
        """Coupling of each composite to the squeezed source mode."""
        N = self.N
        return {label: math.sqrt(count / N) for label, count in self.counts().items() if count > 0}

    def index(self, label: str) -> int:
        return self.labels.index(label)


# ============ Entanglement Schemas ============
class SplittingSpec(BaseModel):
    """Bipartition side_a | side_b after tracing out `traced`."""

    side_a: Tuple[int, ...]
    side_b: Tuple[int, ...]
    traced: Tuple[int, ...] = ()
    label: str = ""

    model_config = ConfigDict(frozen=True)

    @field_validator("side_a", "side_b", "traced")
    @classmethod
    def _sorted(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(sorted(v))

    @model_validator(mode="after")
    def _disjoint(self) -> "SplittingSpec":
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a splitting must be nonempty")
        a, b, t = set(self.side_a), set(self.side_b), set(self.traced)
        if len(a) != len(self.side_a) or len(b) != len(self.side_b) or len(t) != len(self.traced):
            raise ValueError("repeated mode index in splitting")
        if a & b or a & t or b & t:
            raise ValueError("splitting sides and traced set must be disjoint")
        return self

    @property
    def modes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.side_a + self.side_b + self.traced))

    @property
    def kept(self) -> Tuple[int, ...]:
        return tuple(sorted(self.side_a + self.side_b))

    def swapped(self) -> "SplittingSpec":
        return SplittingSpec(side_a=self.side_b, side_b=self.side_a,
                             traced=self.traced, label=self.label)


class EntanglementReport(BaseModel):
    """Log-negativity of one splitting before and after subtraction."""

    splitting: SplittingSpec
    e_before: Optional[float] = None
    e_after: Optional[float] = None
    gain: Optional[float] = None
    params: GhzParams
    loss: float = 0.0
    success_weight: Optional[float] = None
    detection_probability: Optional[float] = None
    cutoff: Optional[int] = None
    status: RowStatus = "ok"

    @field_validator("e_before", "e_after")
    @classmethod
    def _clamp(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v < 0.0:
            return 0.0
        return v


class HierarchyViolation(BaseModel):
    """A child splitting whose log-negativity exceeds its parent's beyond the slack."""

    parent: str
    child: str
    quantity: Literal["e_before", "e_after"]
    parent_value: float
    child_value: float


# ============ Sweep Schemas ============
class SweepConfig(BaseModel):
    """Everything needed to run one sweep family."""

    family: SweepFamily
    params: GhzParams
    grid: List[float]
    splittings: Union[Literal["all-canonical"], List[str]] = "all-canonical"
    k_values: Optional[List[float]] = None
    loss: float = Field(default=0.0, ge=0.0, le=1.0)
    cutoff: Optional[int] = Field(default=None, ge=2)
    cutoff_ceiling: Optional[int] = Field(default=None, ge=2)
    max_traced: int = Field(default=2, ge=0)
    tap_reflectivity: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    jobs: int = Field(default=1, ge=1)
    direct: bool = False
    output: Optional[Path] = None

    @field_validator("grid")
    @classmethod
    def _strictly_increasing(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("grid must be nonempty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid must be strictly increasing")
        return v

    def series(self) -> List[float]:
        """k values evaluated for each grid point."""
        if self.family == "k_sweep":
            return [self.params.k]
        if self.k_values is not None:
            return list(self.k_values)
        defaults = {"n_sweep": [0.0, 0.24, 0.82], "loss_sweep": [0.0, 0.82]}
        return defaults.get(self.family, [self.params.k])

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


class SweepRow(BaseModel):
    grid_param: str
    grid_value: float
    splitting: str
    e_before: Optional[float] = None
    e_after: Optional[float] = None
    gain: Optional[float] = None
    success_weight: Optional[float] = None
    cutoff: Optional[int] = None
    k: float
    status: RowStatus = "ok"
    detection_probability: Optional[float] = None

    @classmethod
    def from_report(cls, report: EntanglementReport, grid_param: str,
                    grid_value: float) -> "SweepRow":
        return cls(
            grid_param=grid_param,
            grid_value=grid_value,
            splitting=report.splitting.label,
            e_before=report.e_before,
            e_after=report.e_after,
            gain=report.gain,
            success_weight=report.success_weight,
            cutoff=report.cutoff,
            k=report.params.k,
            status=report.status,
            detection_probability=report.detection_probability,
        )


class SweepResult(BaseModel):
    """Rows in grid order plus provenance."""

    config: SweepConfig
    rows: List[SweepRow]
    provenance: Dict[str, Any] = Field(default_factory=dict)

    def splittings(self) -> List[str]:
        seen: Dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.splitting, None)
        return list(seen)

    def series(self) -> List[float]:
        seen: Dict[float, None] = {}
        for row in self.rows:
            seen.setdefault(row.k, None)
        return list(seen)

    def select(self, splitting: Optional[str] = None, k: Optional[float] = None) -> List[SweepRow]:
        return [
            row for row in self.rows
            if (splitting is None or row.splitting == splitting)
            and (k is None or math.isclose(row.k, k, abs_tol=1e-12))
        ]


# ============ Post-processing Schemas ============
class OptimumReport(BaseModel):
    criterion: Literal["max-gain", "all-splittings-beat-k0"]
    argmax: Dict[str, Optional[float]] = Field(default_factory=dict)
    max_gain: Dict[str, Optional[float]] = Field(default_factory=dict)
    winning_k: List[float] = Field(default_factory=list)
    interval: Optional[Tuple[float, float]] = None

    @property
    def empty(self) -> bool:
        return self.criterion == "all-splittings-beat-k0" and self.interval is None


class LossThreshold(BaseModel):
    k: float
    splitting: str
    threshold: Optional[float] = None


class ValidationCase(BaseModel):
    """One oracle comparison of the validation suite."""

    name: str
    expected: float
    observed: Optional[float] = None
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.observed is not None and abs(self.observed - self.expected) <= self.tolerance
