import json
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional, Tuple, Union

from model.circuit.circuit import DEFAULT_LAYOUT, AnsatzTemplate, Observable, parse_layout, template_for
from model.gradient.gradient import ParamIndex, middle_parameter_index
from utils.errors import ConfigError

OBSERVABLES = ("zero_projector", "identity")
MEAN_MODES = ("empirical", "zero")
MIDDLE = "middle"

DEFAULT_SAMPLES = 2000
DEFAULT_SEED = 42
DEFAULT_RESAMPLES = 200


def _int_tuple(value, name) -> Tuple[int, ...]:
    if isinstance(value, (int, str)):
        value = [value]
    try:
        out = tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of integers, got {value!r}")
    if not out:
        raise ConfigError(f"{name} must not be empty")
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, immutable sweep parameters; JSON keys equal the field names"""
    template: str = "D"
    n_values: Tuple[int, ...] = (3, 4)
    d_prime_values: Tuple[int, ...] = (2, 3, 4, 5)
    L_values: Tuple[int, ...] = (10, 15, 20, 25, 30)
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    observable: str = "zero_projector"
    param_index: Union[Tuple[int, int], str] = (1, 1)
    mean_mode: str = "empirical"
    threads: Optional[int] = None
    bootstrap_resamples: int = DEFAULT_RESAMPLES
    ansatz_layout: Optional[dict] = None

    def __post_init__(self):
        for name in ("n_values", "d_prime_values", "L_values"):
            object.__setattr__(self, name, _int_tuple(getattr(self, name), name))
        if any(n < 1 for n in self.n_values):
            raise ConfigError(f"n values must be >= 1, got {self.n_values}")
        if any(d < 2 for d in self.d_prime_values):
            raise ConfigError(f"d' values must be >= 2, got {self.d_prime_values}")
        if any(L < 1 for L in self.L_values):
            raise ConfigError(f"L values must be >= 1, got {self.L_values}")
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"observable must be one of {OBSERVABLES}, got {self.observable!r}")
        if self.mean_mode not in MEAN_MODES:
            raise ConfigError(f"mean_mode must be one of {MEAN_MODES}, got {self.mean_mode!r}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.bootstrap_resamples < 2:
            raise ConfigError(f"bootstrap_resamples must be >= 2, got {self.bootstrap_resamples}")
        if self.param_index != MIDDLE:
            try:
                q, p = (int(v) for v in self.param_index)
            except (TypeError, ValueError):
                raise ConfigError(f"param_index must be [q, p] or {MIDDLE!r}, got {self.param_index!r}")
            if q < 1 or p < 1 or q > min(self.n_values) or p > min(self.L_values):
                raise ConfigError(f"param_index ({q}, {p}) outside the smallest grid cell")
            object.__setattr__(self, "param_index", (q, p))
        # raises ConfigError for unknown labels or bad layouts
        self.ansatz()

    @property
    def layout(self):
        if self.ansatz_layout is None:
            return DEFAULT_LAYOUT
        return parse_layout(self.ansatz_layout)

    @property
    def workers(self) -> int:
        return self.threads or os.cpu_count() or 1

    def ansatz(self) -> AnsatzTemplate:
        return template_for(self.template, self.layout)

    def make_observable(self, n: int, d: int) -> Observable:
        if self.observable == "identity":
            return Observable.identity(n, d)
        return Observable.zero_projector(n, d)

    def param_index_for(self, L: int) -> ParamIndex:
        """Derivative address for a cell of depth L"""
        if self.param_index == MIDDLE:
            return middle_parameter_index(L)
        return ParamIndex(*self.param_index)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Replace only the fields given a non-None value"""
        given = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(given) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return replace(self, **given)

    def to_dict(self) -> dict:
        data = asdict(self)
        for name in ("n_values", "d_prime_values", "L_values"):
            data[name] = list(data[name])
        if data["param_index"] != MIDDLE:
            data["param_index"] = list(data["param_index"])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e))

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}")
        return cls.from_dict(data)
