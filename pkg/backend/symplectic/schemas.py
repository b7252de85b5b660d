"""
Run specs and reports exchanged by the command-line front end.
"""

from math import gcd
from typing import Any, Dict, List, Literal, Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import default_tolerances

Command = Literal[
    "maslov-index",
    "involution",
    "independence",
    "flow",
    "proj-tori",
    "image-of-j",
    "wks-verify",
    "eschenburg-verify",
    "esch-enumerate",
    "wks-classify",
    "table-verify",
]


class Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrigPolynomialSpec(BaseModel):
    constant: float
    cos: List[float] = []
    sin: List[float] = []


# lambda_1 = 2 + 0.1 sin(2 pi x), lambda_2 = 5
DEFAULT_EIGENFUNCTIONS = [
    TrigPolynomialSpec(constant=2.0, sin=[0.1]),
    TrigPolynomialSpec(constant=5.0),
]


class PolynomialSpec(BaseModel):
    """Either leading coefficient and roots, or coefficients in increasing powers"""

    leading: Optional[float] = None
    roots: Optional[List[float]] = None
    coefficients: Optional[List[float]] = None

    @model_validator(mode="after")
    def one_form(self):
        if (self.coefficients is None) == (self.roots is None):
            raise ValueError("give either roots (with leading) or coefficients")
        return self


class MaslovParams(Params):
    loop: Literal["canonical", "random"] = "canonical"
    n: int = Field(1, ge=1)
    samples: int = Field(64, ge=2)
    turns: int = Field(1, ge=1)
    windings: Optional[List[int]] = None
    reverse: bool = False

    @model_validator(mode="after")
    def windings_match(self):
        if self.loop == "random" and (self.windings is None or len(self.windings) != self.n):
            raise ValueError("a random loop needs one winding number per dimension")
        return self


class InvolutionParams(Params):
    eigenfunctions: List[TrigPolynomialSpec] = DEFAULT_EIGENFUNCTIONS
    taus: Optional[List[float]] = None
    states: int = Field(20, ge=1)
    analytic: bool = False


class IndependenceParams(Params):
    system: Literal["wks", "shift-su3"] = "wks"
    k: int = 1
    l: int = 4
    lambdas: List[float] = [0.0, 1.0, 2.0]


class FlowParams(Params):
    system: Literal["proj-tori", "sphere"] = "proj-tori"
    eigenfunctions: List[TrigPolynomialSpec] = DEFAULT_EIGENFUNCTIONS
    taus: Optional[List[float]] = None
    flow_tau: float = 0.0
    dimension: int = Field(3, ge=2)
    T: float = Field(10.0, gt=0)
    steps: int = Field(10_000, ge=1)


class TorusParams(Params):
    eigenfunctions: List[TrigPolynomialSpec] = DEFAULT_EIGENFUNCTIONS
    polynomial: PolynomialSpec = PolynomialSpec(leading=1.0, roots=[2.0])
    samples: int = Field(256, ge=4)
    states: int = Field(20, ge=1)
    orbit_T: float = Field(8.0, ge=0)
    orbit_steps: int = Field(4000, ge=1)


class ImageParams(Params):
    eigenfunctions: List[TrigPolynomialSpec] = DEFAULT_EIGENFUNCTIONS
    polynomials: List[PolynomialSpec] = Field(min_length=1)


class WKSParams(Params):
    k: int
    l: int
    samples: int = Field(10, ge=1)

    @model_validator(mode="after")
    def free_action(self):
        if gcd(self.k, self.l) != 1 or self.k * self.l == 0:
            raise ValueError(f"(k, l) = ({self.k}, {self.l}) must be coprime and non-zero")
        return self


class EschenburgParams(Params):
    k: int
    l: int
    p: int
    q: int
    points: int = Field(3, ge=1)


class EnumerateParams(Params):
    bounds: List[Tuple[int, int]] = Field(min_length=4, max_length=4)
    workers: int = Field(1, ge=1)
    cross_check: bool = True


class ClassifyParams(Params):
    k: int
    l: int
    enumerate_structures: bool = False

    @field_validator("l")
    @classmethod
    def coprime(cls, l, info):
        k = info.data.get("k")
        if k is not None and gcd(k, l) != 1:
            raise ValueError(f"({k}, {l}) is not a coprime pair")
        return l


class TableParams(Params):
    path: Optional[str] = None


PARAMETER_MODELS: Dict[str, Type[Params]] = {
    "maslov-index": MaslovParams,
    "involution": InvolutionParams,
    "independence": IndependenceParams,
    "flow": FlowParams,
    "proj-tori": TorusParams,
    "image-of-j": ImageParams,
    "wks-verify": WKSParams,
    "eschenburg-verify": EschenburgParams,
    "esch-enumerate": EnumerateParams,
    "wks-classify": ClassifyParams,
    "table-verify": TableParams,
}


class RunSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Command
    parameters: Dict[str, Any] = {}
    seed: int = 0
    tolerances: Dict[str, Any] = {}

    @model_validator(mode="after")
    def validate_parameters(self):
        try:
            PARAMETER_MODELS[self.command].model_validate(self.parameters)
            default_tolerances().merged(self.tolerances)
        except ValidationError as e:
            raise ValueError(str(e)) from None
        return self

    def typed_parameters(self) -> Params:
        return PARAMETER_MODELS[self.command].model_validate(self.parameters)


class RunReport(BaseModel):
    command: Command
    inputs: Dict[str, Any]
    seed: int
    tolerances: Dict[str, Any]
    results: Dict[str, Any]
    assertions: Dict[str, bool]
    passed: bool
    wall_time: float
