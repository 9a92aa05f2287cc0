"""Request and report models for the job runner, CLI and HTTP service.

Configs name a catalog problem (plus parameters) or carry inline
trig-polynomial literals for a scalar ODE ``{p, q, r}`` or a planar system
``{a11, a12, a21, a22}``.  Reports are plain data: every complex number is a
``{re, im}`` object so the JSON stays language-neutral, and serialization
goes through the canonical 17-significant-digit emitter in :mod:`.jobs` (not
the default JSON encoder) so identical configs give byte-identical reports.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .problems import PlanarSystem, ScalarODE
from .trigpoly import TrigPoly

__all__ = [
    "TrigPolyIn",
    "ProblemSpec",
    "SweepSpec",
    "OutputSpec",
    "JobConfig",
    "ExportRequest",
    "ComplexVal",
    "EtaReport",
    "FloquetReport",
    "MonodromyReport",
    "ReferenceReport",
    "CommutingReport",
    "SolveRow",
    "ReportMeta",
    "Report",
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class TrigPolyIn(StrictModel):
    """Serialized trig polynomial: value = a0/2 + sum a_k cos + b_k sin."""

    omega: float = Field(gt=0)
    a0: float = 0.0
    a: list[float] = Field(default_factory=list)
    b: list[float] = Field(default_factory=list)

    def build(self):
        return TrigPoly(self.omega, [self.a0, *self.a], [0.0, *self.b])


_SCALAR_FIELDS = ("p", "q", "r")
_SYSTEM_FIELDS = ("a11", "a12", "a21", "a22")


class ProblemSpec(StrictModel):
    """Exactly one problem source: catalog name, scalar triple, or system."""

    name: Optional[str] = None
    params: dict[str, float] = Field(default_factory=dict)
    p: Optional[TrigPolyIn] = None
    q: Optional[TrigPolyIn] = None
    r: Optional[TrigPolyIn] = None
    a11: Optional[TrigPolyIn] = None
    a12: Optional[TrigPolyIn] = None
    a21: Optional[TrigPolyIn] = None
    a22: Optional[TrigPolyIn] = None

    @model_validator(mode="after")
    def _one_source(self):
        scalar = [getattr(self, f) is not None for f in _SCALAR_FIELDS]
        system = [getattr(self, f) is not None for f in _SYSTEM_FIELDS]
        sources = (self.name is not None) + any(scalar) + any(system)
        if sources != 1:
            raise ValueError(
                "problem needs exactly one source: a catalog name, "
                "a {p, q, r} scalar ODE, or an {a11, a12, a21, a22} system"
            )
        if any(scalar) and not all(scalar):
            raise ValueError("inline scalar problems need all of p, q, r")
        if any(system) and not all(system):
            raise ValueError("inline systems need all of a11, a12, a21, a22")
        if self.params and self.name is None:
            raise ValueError("params only apply to catalog problems")
        return self

    def build(self):
        """Construct the ScalarODE / PlanarSystem this spec describes."""
        if self.name is not None:
            from .problems import catalog

            return catalog(self.name, **self.params)
        if self.p is not None:
            return ScalarODE(self.p.build(), self.q.build(), self.r.build())
        return PlanarSystem(
            self.a11.build(), self.a12.build(), self.a21.build(), self.a22.build()
        )


class SweepSpec(StrictModel):
    param: str
    start: float = Field(alias="from")
    stop: float = Field(alias="to")
    count: int = Field(ge=1, le=100000)


class OutputSpec(StrictModel):
    path: str
    format: Literal["json", "csv"] = "json"


class JobConfig(StrictModel):
    problem: ProblemSpec
    method: Literal["hb", "monodromy", "commuting", "all"] = "all"
    n: int = Field(default=3, ge=1, le=16)
    steps: int = Field(default=10000, ge=16)
    sweep: Optional[SweepSpec] = None
    output: Optional[OutputSpec] = None


class ExportRequest(StrictModel):
    """Sampled-solution export: HB solution vs matched reference trajectory."""

    config: JobConfig
    periods: int = Field(default=1, ge=1, le=64)
    points_per_period: int = Field(default=1024, ge=16, le=65536)


# -- report side ---------------------------------------------------------------


class ComplexVal(StrictModel):
    re: float
    im: float

    @classmethod
    def of(cls, z):
        z = complex(z)
        return cls(re=z.real, im=z.imag)


class EtaReport(StrictModel):
    omega: float
    a0: ComplexVal
    a: list[ComplexVal]
    b: list[ComplexVal]

    @classmethod
    def of(cls, eta):
        return cls(
            omega=eta.omega,
            a0=ComplexVal.of(eta.a[0]),
            a=[ComplexVal.of(z) for z in eta.a[1:]],
            b=[ComplexVal.of(z) for z in eta.b[1:]],
        )


class FloquetReport(StrictModel):
    lambda_re: float
    lambda_im: float
    E: float
    n: int
    eta: EtaReport
    lambda_raw: ComplexVal
    multiplicity: int

    @classmethod
    def of(cls, sol):
        return cls(
            lambda_re=sol.lambda_.real,
            lambda_im=sol.lambda_.imag,
            E=sol.residual,
            n=sol.n,
            eta=EtaReport.of(sol.eta),
            lambda_raw=ComplexVal.of(sol.lambda_raw),
            multiplicity=sol.multiplicity,
        )


class MonodromyReport(StrictModel):
    C: list[list[float]]
    multipliers: list[ComplexVal]
    exponents: list[ComplexVal]
    steps: int
    defective: bool

    @classmethod
    def of(cls, res):
        order = sorted(range(2), key=lambda i: (res.exponents[i].real, res.exponents[i].imag))
        return cls(
            C=[[float(x) for x in row] for row in res.C],
            multipliers=[ComplexVal.of(res.multipliers[i]) for i in order],
            exponents=[ComplexVal.of(res.exponents[i]) for i in order],
            steps=res.steps,
            defective=res.defective,
        )


class ReferenceReport(StrictModel):
    exponents: list[ComplexVal]
    steps: int


class CommutingReport(StrictModel):
    alpha: float
    beta: float
    gamma: ComplexVal
    exponents: list[ComplexVal]
    classification: str


class SolveRow(StrictModel):
    param: dict[str, float] = Field(default_factory=dict)
    status: str = "ok"
    hb: Optional[list[FloquetReport]] = None
    monodromy: Optional[MonodromyReport] = None
    reference: Optional[ReferenceReport] = None
    commuting: Optional[CommutingReport] = None
    s_squared: Optional[float] = None
    boundedness: Optional[str] = None


class ReportMeta(StrictModel):
    package: str
    version: str
    status: Literal["ok", "partial"]


class Report(StrictModel):
    config: JobConfig
    rows: list[SolveRow]
    meta: ReportMeta
