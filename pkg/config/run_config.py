"""
YAML run configuration.

A run config is one YAML document with the sections below; only `params`
is required, every other section has defaults.

    params:        {kappa, omega, gamma, hbar, ratio}
    integrator:    {dt, t_end, method, newton_tol, newton_max_iter, record_every}
    initial_state: {x, y, px, py}
    closure:       {enabled, tol}
    grid:          {n_points, length, scheme, richardson}
    spectrum:      {energy_cutoff, max_key}
    eigensolve:    {mu, n_eigs, max_mu, max_nu}
    verify:        {suites, options}
    output:        {dir, prefix}
    seed:          int
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from core import classical
from core.dynamics import IntegratorConfig, IntegratorMethod
from core.exceptions import ConfigError, DomainError
from core.params import ModelParams, PhasePoint
from core.qnumeric import EigenScheme, Grid1D
from core.verification import SuiteOptions, resolve_suites

logger = logging.getLogger(__name__)


class IntegratorSection(BaseModel):
    """Integrator settings; dt defaults to 1e-3 * 2 pi / omega."""
    dt: Optional[float] = None
    t_end: float = 20.0
    method: IntegratorMethod = IntegratorMethod.IMPLICIT_MIDPOINT
    newton_tol: float = 1e-13
    newton_max_iter: int = 50
    record_every: int = 1

    model_config = ConfigDict(extra='forbid')

    def build(self, p: ModelParams) -> IntegratorConfig:
        fields = self.model_dump(exclude={'dt'})
        if self.dt is None:
            return IntegratorConfig.default_for(p, **fields)
        return IntegratorConfig(dt=self.dt, **fields)


class ClosureSection(BaseModel):
    """Closed-orbit search after `simulate`."""
    enabled: bool = True
    tol: float = 1e-6

    model_config = ConfigDict(extra='forbid')


class GridSection(BaseModel):
    """Finite-difference grid of the eigensolves."""
    n_points: int = 2000
    length: Optional[float] = None
    scheme: EigenScheme = EigenScheme.SYMMETRIC
    richardson: bool = False

    model_config = ConfigDict(extra='forbid')

    @field_validator('n_points')
    @classmethod
    def validate_n_points(cls, v):
        """Validate the grid size."""
        if v < 3:
            raise ValueError(f"n_points must be >= 3, got {v}")
        return v

    def build(self, p: ModelParams) -> Grid1D:
        return Grid1D.for_params(p, self.n_points, self.length)


class SpectrumSection(BaseModel):
    """Cutoffs of the level enumeration (one is required on the sphere and the plane)."""
    energy_cutoff: Optional[float] = None
    max_key: Optional[int] = None

    model_config = ConfigDict(extra='forbid')


class EigensolveSection(BaseModel):
    """
    Eigensolve request.

    The xi-problem is solved with n_eigs eigenpairs; the y-problem at
    g = gamma eps_mu for the given mu. The comparison table covers all
    (mu, nu) with mu <= max_mu and nu <= max_nu.
    """
    mu: int = 0
    n_eigs: int = 8
    max_mu: int = 3
    max_nu: int = 3

    model_config = ConfigDict(extra='forbid')

    @field_validator('mu', 'max_mu', 'max_nu')
    @classmethod
    def validate_index(cls, v, info):
        """Validate quantum numbers."""
        if v < 0:
            raise ValueError(f"{info.field_name} must be >= 0, got {v}")
        return v

    @field_validator('n_eigs')
    @classmethod
    def validate_n_eigs(cls, v):
        """Validate the number of eigenpairs."""
        if v < 1:
            raise ValueError(f"n_eigs must be >= 1, got {v}")
        return v


class VerifySection(BaseModel):
    """Suites to run and their workloads."""
    suites: List[str] = ['all']
    options: SuiteOptions = Field(default_factory=SuiteOptions)

    model_config = ConfigDict(extra='forbid')


class OutputSection(BaseModel):
    """Artifact location; dir defaults to the settings' output_dir."""
    dir: Optional[Path] = None
    prefix: str = ""

    model_config = ConfigDict(extra='forbid')


class RunConfig(BaseModel):
    """
    Complete run configuration.

    Attributes:
        params (ModelParams): Model parameters
        integrator (IntegratorSection): Integrator settings
        initial_state (Optional[PhasePoint]): Initial state of `simulate`
        closure (ClosureSection): Closed-orbit search
        grid (GridSection): Eigensolver grid
        spectrum (SpectrumSection): Enumeration cutoffs
        eigensolve (EigensolveSection): Eigensolve request
        verify (VerifySection): Suites
        output (OutputSection): Output location
        seed (Optional[int]): Seed of the randomized checks
    """
    params: ModelParams
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    initial_state: Optional[PhasePoint] = None
    closure: ClosureSection = Field(default_factory=ClosureSection)
    grid: GridSection = Field(default_factory=GridSection)
    spectrum: SpectrumSection = Field(default_factory=SpectrumSection)
    eigensolve: EigensolveSection = Field(default_factory=EigensolveSection)
    verify: VerifySection = Field(default_factory=VerifySection)
    output: OutputSection = Field(default_factory=OutputSection)
    seed: Optional[int] = None

    model_config = ConfigDict(extra='forbid')

    def check_preconditions(self, command: str) -> None:
        """
        Validate the sections a command uses against the module preconditions.

        Raises:
            DomainError: If the initial state or the grid violates the domain
            ConfigError: If a section the command needs is missing or invalid
        """
        if command == 'simulate':
            if self.initial_state is None:
                raise ConfigError("simulate needs an initial_state section")
            classical.validate_state(self.params, self.initial_state)
            classical.hamiltonian(self.params, self.initial_state)
            self.integrator.build(self.params)
        elif command == 'eigensolve':
            if self.params.kappa == 0.0:
                raise DomainError("eigensolve needs kappa != 0 (the separated problems carry 1/kappa terms)")
            self.grid.build(self.params)
        elif command in ('spectrum', 'degeneracies'):
            if self.params.kappa >= 0.0 and self.spectrum.energy_cutoff is None and self.spectrum.max_key is None:
                raise ConfigError("spectrum needs energy_cutoff or max_key for kappa >= 0")
            if command == 'degeneracies' and self.params.ratio is None:
                raise ConfigError("degeneracies needs params.ratio (m, n)")
        elif command == 'verify':
            resolve_suites(self.verify.suites)


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item['loc'])
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def _check_params(params) -> None:
    """Raise DomainError when well-formed params violate a model precondition."""
    if not isinstance(params, dict):
        return
    try:
        ModelParams.model_validate(params)
    except ValidationError as e:
        # type and missing-field errors stay configuration errors
        if all(item['type'] == 'value_error' for item in e.errors()):
            raise DomainError(f"invalid params: {_format_validation_error(e)}")


def parse_run_config(data: dict) -> RunConfig:
    """
    Validate a parsed YAML document.

    Raises:
        ConfigError: If the document does not match the schema
        DomainError: If params are well-formed but violate a model precondition
            (gamma < 1/2 on the sphere, non-positive omega, gamma != m/n, ...)
    """
    if not isinstance(data, dict):
        raise ConfigError(f"run config must be a mapping, got {type(data).__name__}")
    _check_params(data.get('params'))
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {_format_validation_error(e)}")


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Load and validate a YAML run config.

    Raises:
        ConfigError: If the file cannot be read, parsed or validated
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {str(e)}")
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path}: {str(e)}")
    logger.info("loaded run config %s", path)
    return parse_run_config(data if data is not None else {})
