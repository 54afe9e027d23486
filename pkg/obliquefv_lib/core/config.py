import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from obliquefv_lib.core.errors import ConfigError, ObliqueFVError

Dims = Tuple[int, int, int]

AUTO = "auto"


def _default_levels() -> List[Dims]:
    return [(3, 3, 3), (7, 7, 7), (15, 15, 15)]


def parse_dims(text: str) -> Dims:
    """'7x7x7' or '7' to (7, 7, 7)."""
    parts = text.strip().lower().split("x")
    try:
        numbers = [int(part) for part in parts]
    except ValueError:
        raise ConfigError(f"cannot read grid dims from '{text}'") from None
    if len(numbers) == 1:
        numbers = numbers * 3
    if len(numbers) != 3:
        raise ConfigError(f"grid dims need three numbers, got '{text}'")
    return tuple(numbers)


def format_dims(dims: Dims) -> str:
    return "x".join(str(n) for n in dims)


def _parse_levels(text: str) -> List[Dims]:
    levels = [parse_dims(item) for item in text.split(",") if item.strip()]
    if not levels:
        raise ConfigError("levels must list at least one grid")
    return levels


def _optional(parser):
    def parse(text: str):
        return None if text.strip().lower() == AUTO else parser(text)
    return parse


def _number(kind):
    def parse(text: str):
        try:
            return kind(text)
        except ValueError:
            raise ConfigError(f"'{text}' is not a valid {kind.__name__}") from None
    return parse


_PARSERS = {
    "domain": str,
    "case": str,
    "scheme": str,
    "levels": _parse_levels,
    "amplitude": _number(float),
    "seed": _number(int),
    "stabilization": _optional(_number(float)),
    "tol": _number(float),
    "max_iter": _optional(_number(int)),
    "max_obliquity": _number(float),
    "output_dir": str,
}


def _format(value: Any) -> str:
    if value is None:
        return AUTO
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(format_dims(dims) for dims in value)
    return str(value)


@dataclass
class ExperimentConfig:
    """
    Settings of a refinement study.

    ``stabilization`` and ``max_iter`` left as None are chosen per level
    (R = max(1, ‖W‖_∞), 20 iterations per unknown).
    """
    domain: str = "cube"
    case: str = "cube-constant"
    scheme: str = "central"
    levels: List[Dims] = field(default_factory=_default_levels)
    amplitude: float = 0.15
    seed: int = 42
    stabilization: Optional[float] = None
    tol: float = 1e-10
    max_iter: Optional[int] = None
    max_obliquity: float = 10.0
    output_dir: str = "results"

    @classmethod
    def from_dict(cls, data: Dict[str, str]) -> 'ExperimentConfig':
        """Build from raw text values keyed by field name."""
        unknown = sorted(set(data) - set(_PARSERS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values = {key: _PARSERS[key](text) for key, text in data.items()}
        return cls(**values)

    @classmethod
    def from_text(cls, text: str) -> 'ExperimentConfig':
        data: Dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {number}: expected 'key = value', got '{raw.strip()}'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in data:
                raise ConfigError(f"line {number}: duplicate key '{key}'")
            data[key] = value
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'ExperimentConfig':
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as error:
            raise ConfigError(f"cannot read config '{path}': {error}") from None
        return cls.from_text(text)

    def to_text(self) -> str:
        lines = [f"{f.name} = {_format(getattr(self, f.name))}" for f in dataclasses.fields(self)]
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    def override(self, texts: Dict[str, str]) -> 'ExperimentConfig':
        """Copy with fields replaced from raw text values, as given on a command line."""
        unknown = sorted(set(texts) - set(_PARSERS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return dataclasses.replace(self, **{key: _PARSERS[key](text) for key, text in texts.items()})

    def validate(self) -> 'ExperimentConfig':
        from obliquefv_lib.analysis.cases import case_domain
        from obliquefv_lib.assembly.schemes import SCHEMES
        from obliquefv_lib.mesh.domains import get_domain

        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme '{self.scheme}' (expected one of: {', '.join(SCHEMES)})")
        try:
            domain = get_domain(self.domain).domain_id
            expected = case_domain(self.case)
        except ObliqueFVError as error:
            raise ConfigError(str(error)) from None
        if expected != domain:
            raise ConfigError(f"case '{self.case}' lives on the {expected.value} domain, not {domain.value}")
        for dims in self.levels:
            if len(dims) != 3 or min(dims) < 2:
                raise ConfigError(f"grid dims must be >= 2 in every direction, got {format_dims(dims)}")
        if not 0.0 <= self.amplitude < 0.5:
            raise ConfigError(f"amplitude must lie in [0, 0.5), got {self.amplitude}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.stabilization is not None and self.stabilization <= 0.0:
            raise ConfigError(f"stabilization must be positive, got {self.stabilization}")
        if not 0.0 < self.tol < 1.0:
            raise ConfigError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iter is not None and self.max_iter <= 0:
            raise ConfigError(f"max_iter must be positive, got {self.max_iter}")
        if self.max_obliquity <= 0.0:
            raise ConfigError(f"max_obliquity must be positive, got {self.max_obliquity}")
        return self
