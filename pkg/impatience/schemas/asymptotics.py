"""Result records of the asymptotic verification harness."""
from pydantic import BaseModel, ConfigDict, Field


class SweepPoint(BaseModel):
    n: int
    replications: int
    jockey_fraction: float = Field(ge=0.0, le=1.0)
    renege_probability: float = Field(ge=0.0, le=1.0)
    renege_low: float
    renege_high: float
    jockey_success_probability: float = Field(ge=0.0, le=1.0)
    jockey_success_low: float
    jockey_success_high: float
    renege_trend: float
    jockey_success_trend: float

    model_config = ConfigDict(frozen=True)


class BacklogSweep(BaseModel):
    patience: float
    m: int
    m_mode: str
    mode: str
    mu_1: float
    mu_2: float
    confidence: float
    points: list[SweepPoint]
    renege_target_met: bool
    jockey_target_met: bool
    monotone: bool

    model_config = ConfigDict(frozen=True)

    @property
    def passed(self) -> bool:
        return self.renege_target_met and self.jockey_target_met and self.monotone


class ErrorPoint(BaseModel):
    n: int
    estimate: float
    median_ratio: float = Field(ge=0.0)
    mean_ratio: float = Field(ge=0.0)
    p90_ratio: float = Field(ge=0.0)

    model_config = ConfigDict(frozen=True)


class ErrorProfile(BaseModel):
    """Per-backlog error ratios ``|W_hat(n) - W(n)| / n`` and their trend against ``log n``."""

    provenance: str
    mu: float
    points: list[ErrorPoint]
    slope: float
    final_median_scaled: float
    passed: bool

    model_config = ConfigDict(frozen=True)


class AgreementPoint(BaseModel):
    n: int
    feed_agreement: float = Field(ge=0.0, le=1.0)
    first_vs_truth: float = Field(ge=0.0, le=1.0)
    second_vs_truth: float = Field(ge=0.0, le=1.0)
    truth_switch_fraction: float = Field(ge=0.0, le=1.0)
    mean_sign: int

    model_config = ConfigDict(frozen=True)


class AgreementCurve(BaseModel):
    first: str
    second: str
    m: int
    points: list[AgreementPoint]

    model_config = ConfigDict(frozen=True)


class ChernoffRow(BaseModel):
    n: int
    x: float
    tail: str
    rate: float
    bound: float
    exact: float
    empirical: float
    standard_error: float
    passed: bool

    model_config = ConfigDict(frozen=True)


class ChernoffReport(BaseModel):
    mu: float
    rate_at_one: float
    convex: bool
    rows: list[ChernoffRow]

    model_config = ConfigDict(frozen=True)

    @property
    def passed(self) -> bool:
        return self.rate_at_one == 0.0 and self.convex and all(row.passed for row in self.rows)


class Check(BaseModel):
    name: str
    passed: bool
    detail: str


class AsymptoticsReport(BaseModel):
    schema_version: int = 1
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
