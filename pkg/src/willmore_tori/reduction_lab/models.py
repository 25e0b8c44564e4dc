"""Result records of the reduction experiments (JSON/CSV serializable)."""

from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, Field

LANDSCAPE_COLUMNS = [
    "P_x",
    "P_y",
    "P_z",
    "axis_x",
    "axis_y",
    "axis_z",
    "omega_x",
    "omega_y",
    "energy",
]


class ExpansionFit(BaseModel):
    """Least-squares expansion of an energy in a small parameter, compared to its closed form."""

    kind: str = Field(..., description="symmetric, degenerate or sphere")
    abscissae: List[float] = Field(..., description="eps, |omega| or r values")
    energies: List[float]
    c0: float = Field(..., description="Fitted constant term")
    c_lead: float = Field(..., description="Fitted leading coefficient")
    target: float = Field(..., description="Closed-form leading coefficient")
    expected_c0: float
    rel_error: float
    residual_norm: float
    c_remainder: Optional[float] = Field(default=None, description="Coefficient of the remainder power")
    c_lead_plain: Optional[float] = Field(default=None, description="Leading coefficient without remainder term")
    deviations: List[float] = Field(default_factory=list)
    excluded: List[float] = Field(default_factory=list, description="Abscissae dropped at the resolution cap")
    monotone: Optional[bool] = None
    flagged: bool = False

    @property
    def c0_error(self) -> float:
        return abs(self.c0 - self.expected_c0)

    class Config:
        frozen = True
        extra = "forbid"


class LandscapeRow(BaseModel):
    P: List[float]
    axis: List[float]
    rotation: List[float]
    omega: List[float]
    energy: float

    class Config:
        frozen = True
        extra = "forbid"


class LandscapeTable(BaseModel):
    """Reduced energies at one epsilon for one model."""

    epsilon: float
    model: str
    corrected: bool = False
    rows: List[LandscapeRow] = Field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        records = [
            [*row.P, *row.axis, *row.omega, row.energy] for row in self.rows
        ]
        return pd.DataFrame(records, columns=LANDSCAPE_COLUMNS)

    class Config:
        frozen = True
        extra = "forbid"


class ConditionReport(BaseModel):
    """Curvature conditions for interior minima (first) and maxima (second) of the reduced energy."""

    lhs1: float = Field(..., description="3 sup_P (Sc - min Ric)")
    rhs1: float = Field(..., description="2 sup_P Sc")
    lhs2: float = Field(..., description="3 inf_P (Sc - max Ric)")
    rhs2: float = Field(..., description="2 inf_P Sc")
    assump1_holds: bool
    assump2_holds: bool
    witness_min_point: List[float]
    witness_min_direction: List[float]
    witness_max_point: List[float]
    witness_max_direction: List[float]
    sectional_identity_error: float = Field(
        ..., description="max |Sc - Ric(n, n) - (Sc/2 + K(n-perp))| over the samples"
    )
    sampled_direction_gap: Optional[float] = Field(
        default=None, description="min over samples of sampled inf Ric(v, v) - exact minimum (>= 0)"
    )

    class Config:
        frozen = True
        extra = "forbid"


class ALEReport(BaseModel):
    """Asymptotic flatness: rescaled C^2 deviation from delta on unit balls at growing radius."""

    radii: List[float]
    deviations: List[float]
    decay_exponent: float
    scalar_curvature_min: float
    asymptotically_flat: bool

    class Config:
        frozen = True
        extra = "forbid"


class LandscapePoint(BaseModel):
    P: List[float]
    rotation: List[float]
    axis: List[float]
    omega: List[float]
    energy: float

    class Config:
        frozen = True
        extra = "forbid"


class ExtremizeResult(BaseModel):
    """Optimizer outcome and its interiority check against sampled boundary energies."""

    mode: str
    epsilon: float
    r_boundary: float
    point: LandscapePoint
    symmetric_point: LandscapePoint
    boundary_extreme: float
    margin: float = Field(..., description="Positive when the extremum beats every boundary sample")
    interior: bool
    evaluations: int
    stationarity_tol: float
    criticality: Optional[List[float]] = Field(default=None, description="|beta_1..beta_7| at the extremum")

    class Config:
        frozen = True
        extra = "forbid"


class AxisSigns(BaseModel):
    """eps^2 coefficients of symmetric tori at P with radial and tangential axes."""

    P: List[float]
    radial: ExpansionFit
    tangential: ExpansionFit
    sign_flip: bool

    class Config:
        frozen = True
        extra = "forbid"
