"""
Run configuration documents.

A document is YAML with a fixed, versioned schema; every mapping is closed,
so an unknown key is an error rather than a silently ignored setting.
"""
from typing import Annotated, List, Literal, Optional, Union

import pydantic
import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .constant import CONFIG_VERSION
from .direct import SolverConfig
from .envelope import envelope_from_dict
from .errors import InvalidEnvelope, InvalidGrid, ParseError, ValidationError
from .grid import TauGrid, ZetaGrid
from .medium import MediumSpec
from .scenarios import Scenario, get_scenario, scenario_names
from .shaping import DesignRequest


class _Closed(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class _EnvelopeModel(_Closed):
    @model_validator(mode="after")
    def _builds(self):
        try:
            self.to_envelope()
        except InvalidEnvelope as err:
            raise ValueError(str(err)) from err
        return self

    def to_envelope(self):
        return envelope_from_dict(self.model_dump())


class GaussianModel(_EnvelopeModel):
    kind: Literal["gaussian"]
    amplitude: float
    width: float
    center: float = 0.0


class SuperGaussianModel(_EnvelopeModel):
    kind: Literal["supergaussian"]
    amplitude: float
    width: float
    order: int
    center: float = 0.0


class LinearRampModel(_EnvelopeModel):
    kind: Literal["linear_ramp"]
    g_start: float
    g_end: float
    t_start: float
    t_end: float
    shoulder: float = 0.0


class TanhStepModel(_EnvelopeModel):
    kind: Literal["tanh_step"]
    g_low: float
    g_high: float
    t_mid: float
    rise_time: float


class TabulatedModel(_EnvelopeModel):
    kind: Literal["tabulated"]
    tau: List[float]
    values: List[float]


class SumModel(_EnvelopeModel):
    kind: Literal["sum"]
    parts: List["EnvelopeModel"]


class ProductModel(_EnvelopeModel):
    kind: Literal["product"]
    factors: List["EnvelopeModel"]


class ComplementaryModel(_EnvelopeModel):
    kind: Literal["complementary"]
    pedestal: "EnvelopeModel"
    partner: "EnvelopeModel"
    weight: float = 1.0


EnvelopeModel = Annotated[
    Union[GaussianModel, SuperGaussianModel, LinearRampModel, TanhStepModel,
          TabulatedModel, SumModel, ProductModel, ComplementaryModel],
    Field(discriminator="kind"),
]

for _model in (SumModel, ProductModel, ComplementaryModel):
    _model.model_rebuild()


class MediumModel(_Closed):
    kappa_c: float = Field(1.0, gt=0)


class TauGridModel(_Closed):
    tau_min: float
    tau_max: float
    n_tau: int

    @model_validator(mode="after")
    def _builds(self):
        try:
            self.to_grid()
        except InvalidGrid as err:
            raise ValueError(str(err)) from err
        return self

    def to_grid(self):
        return TauGrid(self.tau_min, self.tau_max, self.n_tau)


class ZetaGridModel(_Closed):
    zeta_max: float
    n_zeta: int
    snapshot_stride: int = 1

    @model_validator(mode="after")
    def _builds(self):
        try:
            self.to_grid()
        except InvalidGrid as err:
            raise ValueError(str(err)) from err
        return self

    def to_grid(self):
        return ZetaGrid(self.zeta_max, self.n_zeta, self.snapshot_stride)


_SOLVER_DEFAULTS = SolverConfig().as_dict()


class SolverModel(_Closed):
    atom_substeps: int = Field(_SOLVER_DEFAULTS["atom_substeps"], ge=1)
    unitarity_tol: float = Field(_SOLVER_DEFAULTS["unitarity_tol"], gt=0)
    max_field: float = Field(_SOLVER_DEFAULTS["max_field"], gt=0)
    max_phase_step: float = Field(_SOLVER_DEFAULTS["max_phase_step"], gt=0)
    edge_tol: float = Field(_SOLVER_DEFAULTS["edge_tol"], gt=0)


class ExplicitModel(_Closed):
    probe: EnvelopeModel
    coupling: EnvelopeModel
    medium: MediumModel = MediumModel()
    tau_grid: TauGridModel
    zeta_grid: ZetaGridModel

    @model_validator(mode="after")
    def _brackets(self):
        try:
            self.to_scenario()
        except InvalidEnvelope as err:
            raise ValueError(str(err)) from err
        return self

    def to_scenario(self):
        return Scenario(
            name="explicit",
            probe=self.probe.to_envelope(),
            coupling=self.coupling.to_envelope(),
            medium=MediumSpec(kappa_c=self.medium.kappa_c),
            tau_grid=self.tau_grid.to_grid(),
            zeta_grid=self.zeta_grid.to_grid(),
            expected=None,
            description="explicit inputs",
        )


class DesignModel(_Closed):
    target: EnvelopeModel
    baseline_v: EnvelopeModel
    depth: float = Field(ge=0)

    def to_request(self):
        return DesignRequest(target=self.target.to_envelope(),
                             baseline_v=self.baseline_v.to_envelope(),
                             depth=self.depth)


class RunConfig(_Closed):
    version: Literal[CONFIG_VERSION]
    scenario: Optional[str] = None
    explicit: Optional[ExplicitModel] = None
    solver: SolverModel = SolverModel()
    solver_mode: Literal["direct", "adiabatic", "both"] = "direct"
    output_dir: str = "out"
    emit_plots: bool = False
    design: Optional[DesignModel] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.scenario is None) == (self.explicit is None):
            raise ValueError("exactly one of 'scenario' and 'explicit' is required")
        if self.scenario is not None and self.scenario not in scenario_names():
            raise ValueError(f"unknown scenario {self.scenario!r}; "
                             f"known: {', '.join(scenario_names())}")
        return self

    def resolve(self):
        """The Scenario this document runs."""
        if self.scenario is not None:
            return get_scenario(self.scenario)
        return self.explicit.to_scenario()

    def solver_config(self):
        return SolverConfig(**self.solver.model_dump())

    def design_request(self):
        if self.design is not None:
            return self.design.to_request()
        scenario = self.resolve()
        if scenario.design is None:
            raise ValidationError("required for the design subcommand", key="design")
        return scenario.design


def _key(loc):
    return ".".join(str(part) for part in loc)


def parse_config(text):
    """
    Parses and validates a YAML run configuration.
    :raises ParseError: malformed YAML, with 1-based line and column.
    :raises ValidationError: schema violation, naming the offending key.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        problem = getattr(err, "problem", None) or str(err)
        if mark is None:
            raise ParseError(problem) from err
        raise ParseError(problem, line=mark.line + 1, column=mark.column + 1) from err

    if not isinstance(data, dict):
        raise ValidationError("config document must be a mapping")

    try:
        return RunConfig.model_validate(data)
    except pydantic.ValidationError as err:
        first = err.errors()[0]
        raise ValidationError(first["msg"], key=_key(first["loc"]) or None) from err


def dump_config(cfg):
    """Normal form of a validated config; parse_config(dump_config(c)) == c."""
    data = cfg.model_dump(mode="json", exclude_none=True)
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def read_config(path):
    try:
        with open(path, "r", encoding="utf8") as f:
            text = f.read()
    except OSError as err:
        raise ValidationError(f"cannot read {path}: {err}", key="config") from err
    return parse_config(text)
