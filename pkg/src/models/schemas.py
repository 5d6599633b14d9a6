"""
Pydantic models and enumerations shared by services and the CLI.
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Engine(str, Enum):
    KMZ_DVV = "kmz_dvv"
    MS_KAPPA1 = "ms_kappa1"
    ALPHA = "alpha"
    INVERTED = "inverted"

    @classmethod
    def parse(cls, name: str) -> "Engine":
        return cls(name.strip().lower())


ALL_ENGINES = "all"


class OutputFormat(str, Enum):
    PLAIN = "plain"
    TSV = "tsv"
    JSON = "json"


class SeriesId(str, Enum):
    """The three series whose inverses are conjectured to be positive."""

    RECURSION_KERNEL = "recursion-kernel"
    ODD_KERNEL = "odd-kernel"
    PLAIN_KERNEL = "plain-kernel"


class SkipReason(str, Enum):
    INDEX_OVERFLOW = "index-overflow"
    GENUS_OVERFLOW = "genus-overflow"


class Suite(str, Enum):
    ALL = "all"
    CONSTANTS = "constants"
    ENGINES = "engines"
    IZ = "iz"
    VOLUMES = "volumes"
    VIRASORO = "virasoro"
    SHIFT = "shift"
    PROPOSITIONS = "propositions"


class VerifyBounds(BaseModel):
    """Truncation bounds for the generating-function checks."""

    model_config = ConfigDict(frozen=True)

    max_t: int = Field(8, ge=0, description="variables t_0 ... t_max_t")
    max_s: int = Field(5, ge=0, description="variables s_1 ... s_max_s")
    max_degree: int = Field(8, ge=0, description="total degree bound")
    commutator_degree: int = Field(3, ge=0, description="basis degree for commutator checks")

    @property
    def nvars(self) -> int:
        return self.max_t + 1 + self.max_s

    def render(self) -> str:
        return f"T={self.max_t},S={self.max_s},deg={self.max_degree}"


class CheckReport(BaseModel):
    """Outcome of a single verification check."""

    name: str
    params: str = ""
    passed: bool = True
    checked: int = 0
    skipped: int = 0
    skip_reasons: Dict[SkipReason, int] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)

    def record_skip(self, reason: SkipReason):
        self.skipped += 1
        self.skip_reasons[reason] = self.skip_reasons.get(reason, 0) + 1

    def record(self, ok: bool, detail: str = ""):
        self.checked += 1
        if not ok:
            self.passed = False
            if len(self.failures) < 10:
                self.failures.append(detail)

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        params = self.params or "-"
        return f"CHECK {self.name} {params} {status} checked={self.checked} skipped={self.skipped}"


class CorrelatorResult(BaseModel):
    """One engine's value for a correlator query."""

    engine: Engine
    genus: int
    kappa: str
    taus: List[int]
    value: str


class TableEntry(BaseModel):
    """A multi-index with its exact value (alpha tables, positivity scans)."""

    multiindex: str
    weight: int
    value: str
    sign: Optional[str] = None

    @field_validator("sign")
    @classmethod
    def validate_sign(cls, v):
        if v is not None and v not in ("+", "-", "0"):
            raise ValueError("sign must be one of +, -, 0")
        return v


class PositivityReport(BaseModel):
    """Signs of the inverse of one conjecture series."""

    series: SeriesId
    max_weight: int
    entries: List[TableEntry] = Field(default_factory=list)

    @property
    def non_positive(self) -> List[TableEntry]:
        return [entry for entry in self.entries if entry.sign != "+"]

    @property
    def all_positive(self) -> bool:
        return not self.non_positive


class BetaRow(BaseModel):
    b: int
    closed: str
    series: str
    agrees: bool


class VolumeTermRecord(BaseModel):
    """One expanded term of a volume polynomial."""

    exponents: List[int]
    coefficient: str
    pi_power: int
