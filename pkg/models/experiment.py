"""Experiment configuration files"""
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from errors import ConfigError

OPERATIONS = (
    "color", "eta", "kappa", "assemble", "eigs", "ninertia", "bs-check", "heat", "dimfit",
    "bound lower-combinatorial", "bound per-edge", "bound bracketing", "bound domination",
    "bound lower-metric", "bound norm", "weyl", "rlc", "report",
)

BUILDERS = ("lattice", "tree", "metric-lattice", "metric-star", "metric-path", "random")

OptionValue = Union[str, int, float, bool, List[Union[str, int, float]]]


def options_argv(options: Dict[str, OptionValue]) -> List[str]:
    """--option value pairs; true booleans become bare flags, lists are comma-joined"""
    args: List[str] = []
    for key, value in options.items():
        flag = f"--{key.replace('_', '-')}"
        if value is True:
            args.append(flag)
        elif value is False:
            continue
        elif isinstance(value, list):
            args.extend([flag, ",".join(str(v) for v in value)])
        else:
            args.extend([flag, str(value)])
    return args


class GraphSource(BaseModel):
    """A graph file or a builder with its options"""

    file: Optional[Path] = None
    builder: Optional[str] = None
    options: Dict[str, OptionValue] = Field(default_factory=dict)

    @field_validator("builder")
    @classmethod
    def known_builder(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in BUILDERS:
            raise ValueError(f"unknown builder {value!r}")
        return value

    @model_validator(mode="after")
    def one_source(self):
        if (self.file is None) == (self.builder is None):
            raise ValueError("graph needs exactly one of file or builder")
        return self


class PotentialSource(BaseModel):
    file: Optional[Path] = None
    gen: Optional[str] = None

    @model_validator(mode="after")
    def one_source(self):
        if self.file is not None and self.gen is not None:
            raise ValueError("potential takes file or gen, not both")
        return self


class Operation(BaseModel):
    """One subcommand run against the experiment's graph and potential"""

    command: str
    options: Dict[str, OptionValue] = Field(default_factory=dict)

    @field_validator("command")
    @classmethod
    def known_command(cls, value: str) -> str:
        value = " ".join(value.split())
        if value not in OPERATIONS:
            raise ValueError(f"unknown operation {value!r}")
        return value

    def argv(self) -> List[str]:
        return [*self.command.split(), *options_argv(self.options)]


class ExperimentConfig(BaseModel):
    """TOML experiment: one graph, one potential, a list of operations"""

    graph: GraphSource
    potential: PotentialSource = Field(default_factory=PotentialSource)
    operations: List[Operation] = Field(min_length=1)
    output: Optional[Path] = None
    seed: Optional[int] = None
    jobs: Optional[int] = Field(default=None, ge=1)
    rtol: Optional[float] = Field(default=None, gt=0)
    mesh_h: Optional[float] = Field(default=None, gt=0)
    refine: int = Field(default=0, ge=0)
    rule: Optional[str] = None

    def shared_argv(self, graph: Path, potential: Optional[Path]) -> List[str]:
        """Flags every operation receives"""
        args = ["--graph", str(graph), "--refine", str(self.refine)]
        if potential is not None:
            args.extend(["--potential", str(potential)])
        if self.mesh_h is not None:
            args.extend(["--mesh-h", str(self.mesh_h)])
        if self.rule is not None:
            args.extend(["--rule", self.rule])
        return args


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """Parse and validate a TOML experiment; every failure names the file"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"experiment file not found: {path}", {"path": str(path)})
    try:
        with path.open("rb") as f:
            raw: Dict[str, Any] = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML in {path}: {e}", {"path": str(path)})
    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment {path}", {"path": str(path), "errors": [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        ]})
    base = path.parent
    if config.graph.file is not None and not config.graph.file.is_absolute():
        config.graph.file = base / config.graph.file
    if config.potential.file is not None and not config.potential.file.is_absolute():
        config.potential.file = base / config.potential.file
    for source in (config.graph.file, config.potential.file):
        if source is not None and not source.is_file():
            raise ConfigError(f"{path} references a missing file: {source}", {"path": str(source), "config": str(path)})
    return config
