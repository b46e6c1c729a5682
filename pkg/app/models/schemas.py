from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator


def _literal(value):
    # TOML 整数和字符串都接受, 统一存为字符串, 由 exact.to_rational 解析
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        raise ValueError("floats are not exact; write the value as a fraction string")
    return value


RationalLiteral = Annotated[str, BeforeValidator(_literal)]


class StrictModel(BaseModel):
    """Base model for corpus files: unknown fields are an error"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# ---------------------------------------------------------------------------
# Geometry files
# ---------------------------------------------------------------------------

class BlowupSpec(StrictModel):
    """One blowup step applied to the base geometry"""
    name: str
    kind: Literal["curve", "point"]
    genus: int = 0
    degrees: dict[str, RationalLiteral] = {}  # D.C 对每个基底除子
    canonical_dot: Optional[RationalLiteral] = None  # K.C, 可选, 用于一致性检查


class NamedClass(StrictModel):
    name: str
    class_: str = Field(alias="class")


class ThreefoldCurveSpec(StrictModel):
    name: str
    dot: dict[str, RationalLiteral]
    model: Literal["base", "flop"] = "base"


class GeometryFile(StrictModel):
    """Threefold geometry: explicit table or base geometry plus blowups"""
    name: str
    description: str = ""
    basis: Optional[list[str]] = None
    anticanonical: Optional[str] = None
    triples: list[tuple[str, str, str, RationalLiteral]] = []
    base: Optional[str] = None
    blowups: list[BlowupSpec] = []
    anticanonical_cube: RationalLiteral
    printed: list[tuple[str, str, str, RationalLiteral]] = []  # 原文印刷的交数, 用于校验
    divisors: list[NamedClass] = []
    curves: list[ThreefoldCurveSpec] = []

    @model_validator(mode="after")
    def check_source(self):
        if self.base is None:
            if not self.basis or self.anticanonical is None:
                raise ValueError("a geometry without 'base' needs 'basis' and 'anticanonical'")
        elif self.basis is not None or self.triples or self.anticanonical is not None:
            raise ValueError("a derived geometry takes its basis, triples and anticanonical class from 'base'")
        return self


# ---------------------------------------------------------------------------
# Surface files
# ---------------------------------------------------------------------------

class SurfaceCurveSpec(StrictModel):
    name: str
    class_: str = Field(alias="class")
    cone: bool = True


class EmbeddingSpec(StrictModel):
    geometry: str
    divisor: str
    map: dict[str, str]  # 三维基底名 -> 曲面上的类表达式


class SurfaceFile(StrictModel):
    name: str
    description: str = ""
    basis: list[str]
    gram: list[tuple[str, str, RationalLiteral]]
    cone_complete: bool = False
    curves: list[SurfaceCurveSpec] = []
    embedding: EmbeddingSpec


# ---------------------------------------------------------------------------
# Certificate files
# ---------------------------------------------------------------------------

class UChamberSpec(StrictModel):
    u: tuple[RationalLiteral, RationalLiteral]
    positive: str
    negative: dict[str, str] = {}
    flops: list[str] = []
    volume: Optional[str] = None  # 体积多项式, 给出时必须一致


class DivisorialCertFile(StrictModel):
    kind: Literal["divisorial"]
    name: str
    description: str = ""
    geometry: str
    divisor: str
    polarization: Optional[str] = None
    log_discrepancy: RationalLiteral = "1"
    tau: RationalLiteral
    expected_S: RationalLiteral
    expected_beta: RationalLiteral
    printed: dict[str, RationalLiteral] = {}
    note: str = ""
    chambers: list[UChamberSpec]


class VChamberSpec(StrictModel):
    v: tuple[str, str]
    positive: str
    negative: dict[str, str] = {}
    ord: str = "0"


class FlagUChamberSpec(StrictModel):
    u: tuple[RationalLiteral, RationalLiteral]
    t: str
    restricted: Optional[str] = None
    restricted_negative: dict[str, str] = {}
    d: Optional[str] = None
    v_chambers: list[VChamberSpec]


class FlagCertFile(StrictModel):
    kind: Literal["flag"]
    name: str
    description: str = ""
    divisorial: str
    surface: str
    curve: str
    expected_S_curve: RationalLiteral
    expected_F_P: Optional[RationalLiteral] = None
    expected_S_point: Optional[RationalLiteral] = None
    printed: dict[str, RationalLiteral] = {}
    note: str = ""
    chambers: list[FlagUChamberSpec]

    @model_validator(mode="after")
    def check_point_data(self):
        if (self.expected_F_P is None) != (self.expected_S_point is None):
            raise ValueError("expected_F_P and expected_S_point go together")
        return self


class UpperBoundCertFile(StrictModel):
    kind: Literal["upper_bound"]
    name: str
    description: str = ""
    geometry: str
    divisor: str
    polarization: Optional[str] = None
    log_discrepancy: RationalLiteral = "1"
    nef_end: RationalLiteral
    tau_bound: RationalLiteral
    expected_S_bound: RationalLiteral
    expected_beta_bound: RationalLiteral
    volume: Optional[str] = None  # [0, nef_end] 上的体积多项式, 给出时必须一致
    claimed_beta: Optional[RationalLiteral] = None
    printed: dict[str, RationalLiteral] = {}
    note: str = ""


CertificateFile = Annotated[
    Union[DivisorialCertFile, FlagCertFile, UpperBoundCertFile],
    Field(discriminator="kind"),
]


# ---------------------------------------------------------------------------
# Scope files
# ---------------------------------------------------------------------------

class CenterSpec(StrictModel):
    name: str
    kind: Literal["divisor", "curve", "point"]
    description: str = ""
    certificate: Optional[str] = None
    covered_by: Optional[str] = None  # 引用同一 scope 中的另一个 center

    @model_validator(mode="after")
    def check_cover(self):
        if (self.certificate is None) == (self.covered_by is None):
            raise ValueError(f"center {self.name} needs exactly one of 'certificate' or 'covered_by'")
        return self


class EffSpec(StrictModel):
    geometry: str
    target: str
    generators: list[str]
    expected: list[int] = []  # 空列表表示不可分解


class ScopeFile(StrictModel):
    family: str
    title: str = ""
    centers: list[CenterSpec] = []
    eff: list[EffSpec] = []


class ExternalFamily(StrictModel):
    family: str
    reference: str


class ExternalFile(StrictModel):
    families: list[ExternalFamily] = []


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class CheckResult(BaseModel):
    """Outcome of one named verification check"""
    name: str
    passed: bool
    detail: str = ""


class PrintedDiscrepancy(BaseModel):
    key: str
    printed: str
    computed: str


class InvariantReport(BaseModel):
    """Exact invariants of one certificate plus its verification verdicts"""
    family: str
    certificate: str
    kind: str
    tau: Optional[str] = None
    S_S: Optional[str] = None
    S_WC: Optional[str] = None
    F_P: Optional[str] = None
    S_WP: Optional[str] = None
    beta: Optional[str] = None
    delta_bound: Optional[str] = None
    S_bound: Optional[str] = None
    beta_bound: Optional[str] = None
    checks: list[CheckResult] = []
    deltas: dict[str, str] = {}  # expected - computed, 仅列出不一致项
    discrepancies: list[PrintedDiscrepancy] = []
    note: str = ""

    @property
    def valid(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def values(self) -> dict[str, str]:
        keys = ("tau", "S_S", "S_WC", "F_P", "S_WP", "beta", "delta_bound", "S_bound", "beta_bound")
        return {key: getattr(self, key) for key in keys if getattr(self, key) is not None}


class LedgerRow(BaseModel):
    center: str
    kind: str
    certificate: str
    values: dict[str, str] = {}
    verdict: str


class EffResult(BaseModel):
    geometry: str
    target: str
    generators: list[str]
    coefficients: Optional[list[int]] = None
    passed: bool


class FamilyLedger(BaseModel):
    """Per-family K-polystability ledger"""
    family: str
    title: str = ""
    rows: list[LedgerRow] = []
    missing: list[str] = []
    eff: list[EffResult] = []
    discrepancies: list[tuple[str, PrintedDiscrepancy]] = []

    @property
    def complete(self) -> bool:
        return not self.missing


class OracleMismatch(BaseModel):
    certificate: str
    chamber: str
    point: str
    expected: str
    computed: str


class RunConfig(BaseModel):
    """Resolved command configuration: settings overridden by CLI arguments"""
    corpus_root: Path
    command: Literal["verify", "report", "oracle", "pfaffian"]
    samples: int = Field(default=25, ge=1)
    seed: int = 7
    max_denominator: int = Field(default=97, ge=2)
    output_format: Literal["table", "machine"] = "table"
