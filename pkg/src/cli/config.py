"""Run configuration: frozen dataclasses parsed from JSON with path-carrying validation."""

import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

from algebra.kernel import Coupling, VarSet
from bethe.model import GenericRational, ModelSpec, RationalFunction, Twist, XXXChain
from bethe.solver import MAX_ITER, N_RANDOM_SEEDS, TOL_NEWTON
from cli.cli_exception import ConfigError
from utils.json_utils import decode_complex, getattr_complex

logger = logging.getLogger(name=__name__)


class ModelKind(Enum):
    CHAIN = "chain"
    GENERIC = "generic"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


@dataclass(frozen=True)
class ModelConfig:
    kind: ModelKind
    c: complex
    xi: tuple[complex, ...] = ()
    r1: RationalFunction = RationalFunction.constant(1)
    r3: RationalFunction = RationalFunction.constant(1)
    lambda2: RationalFunction = RationalFunction.constant(1)

    def build(self) -> ModelSpec:
        if self.kind is ModelKind.CHAIN:
            return XXXChain(VarSet(self.xi), Coupling(self.c))
        return GenericRational(Coupling(self.c), self.r1, self.r3, self.lambda2)


@dataclass(frozen=True)
class SolverConfig:
    n_random: int = N_RANDOM_SEEDS
    max_iter: int = MAX_ITER
    tol: float = TOL_NEWTON
    modes: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    seeds: tuple[tuple[tuple[complex, ...], tuple[complex, ...]], ...] | None = None


@dataclass(frozen=True)
class TaskConfig:
    s: tuple[int, ...] = (1, 2, 3)
    z: tuple[complex, ...] = (0.37 + 0.21j,)
    states: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    sites: tuple[int, ...] = ()
    kappa: Twist = Twist(1.001, 1, 1)
    lemma_n: int = 4


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: OutputFormat = OutputFormat.JSON


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    sector: tuple[int, int] = (1, 0)
    twist: Twist = field(default_factory=Twist.identity)
    solver: SolverConfig = SolverConfig()
    task: TaskConfig = TaskConfig()
    output: OutputConfig = OutputConfig()
    seed: int = 0


_COMPLEX = {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_RATIONAL = {
    "type": "object",
    "properties": {"zeros": {"type": "array", "items": _COMPLEX}, "poles": {"type": "array", "items": _COMPLEX}, "scale": _COMPLEX},
    "additionalProperties": False,
}

RUN_CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "RunConfig",
    "type": "object",
    "required": ["model"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["kind", "c"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [k.value for k in ModelKind]},
                "c": _COMPLEX,
                "xi": {"type": "array", "items": _COMPLEX, "minItems": 1},
                "L": {"type": "integer", "minimum": 1},
                "r1": _RATIONAL,
                "r3": _RATIONAL,
                "lambda2": _RATIONAL,
            },
        },
        "sector": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2},
        "twist": {"type": "array", "items": _COMPLEX, "minItems": 3, "maxItems": 3},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_random": {"type": "integer", "minimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "modes": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}, "minItems": 2, "maxItems": 2},
                "seeds": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {"u": {"type": "array", "items": _COMPLEX}, "v": {"type": "array", "items": _COMPLEX}},
                    },
                },
            },
        },
        "task": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s": {"type": "array", "items": {"enum": [1, 2, 3]}},
                "z": {"type": "array", "items": _COMPLEX},
                "states": {"type": "array", "items": {"type": "string"}},
                "pairs": {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}},
                "sites": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "kappa": {"type": "array", "items": _COMPLEX, "minItems": 3, "maxItems": 3},
                "lemma_n": {"type": "integer", "minimum": 0, "maximum": 8},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"path": {"type": ["string", "null"]}, "format": {"enum": [f.value for f in OutputFormat]}},
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}


def schema_at(*keys: str) -> dict[str, Any]:
    """The sub-schema reached through the given property names; items steps into the items of an array."""
    node = RUN_CONFIG_SCHEMA
    for key in keys:
        node = node["items"] if key == "items" else node["properties"][key]
    return node


def _fields(*keys: str) -> set[str]:
    return set(schema_at(*keys)["properties"])


def _object(value: Any, path: str, allowed: set[str]) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown field")
    return value


def _list(value: Any, path: str, length: int | None = None) -> list[Any]:
    if not isinstance(value, list):
        raise ConfigError(path, f"expected an array, got {type(value).__name__}")
    if length is not None and len(value) != length:
        raise ConfigError(path, f"expected {length} elements, got {len(value)}")
    return value


def _complex(value: Any, path: str) -> complex:
    try:
        return decode_complex(value)
    except ValueError as e:
        raise ConfigError(path, str(e)) from e


def _complexes(value: Any, path: str, length: int | None = None) -> tuple[complex, ...]:
    return tuple(_complex(x, f"{path}[{i}]") for i, x in enumerate(_list(value, path, length)))


def _int(value: Any, path: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    if maximum is not None and value > maximum:
        raise ConfigError(path, f"must be <= {maximum}")
    return value


def _positive(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(path, f"expected a positive number, got {value!r}")
    return float(value)


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    return value


def _twist(value: Any, path: str) -> Twist:
    kappas = _complexes(value, path, 3)
    for i, k in enumerate(kappas):
        if k == 0:
            raise ConfigError(f"{path}[{i}]", "twist parameters must be nonzero")
    return Twist.of(kappas)


def _rational(value: Any, path: str) -> RationalFunction:
    data = _object(value, path, set(_RATIONAL["properties"]))
    try:
        scale = getattr_complex(data, "scale", 1)
    except ValueError as e:
        raise ConfigError(f"{path}.scale", str(e)) from e
    if scale == 0:
        raise ConfigError(f"{path}.scale", "must be nonzero")
    zeros = _complexes(data.get("zeros", []), f"{path}.zeros")
    poles = _complexes(data.get("poles", []), f"{path}.poles")
    return RationalFunction.reduced(zeros, poles, scale)


def parse_model(value: Any, path: str = "$.model") -> ModelConfig:
    data = _object(value, path, _fields("model"))
    if "kind" not in data:
        raise ConfigError(f"{path}.kind", "missing")
    try:
        kind = ModelKind(data["kind"])
    except ValueError:
        raise ConfigError(f"{path}.kind", f"expected one of {[k.value for k in ModelKind]}, got {data['kind']!r}")
    if "c" not in data:
        raise ConfigError(f"{path}.c", "missing")
    c = _complex(data["c"], f"{path}.c")
    if c == 0:
        raise ConfigError(f"{path}.c", "coupling must be nonzero")

    if kind is ModelKind.GENERIC:
        for key in ("xi", "L"):
            if key in data:
                raise ConfigError(f"{path}.{key}", "only valid for a chain")
        return ModelConfig(
            kind,
            c,
            r1=_rational(data.get("r1", {}), f"{path}.r1"),
            r3=_rational(data.get("r3", {}), f"{path}.r3"),
            lambda2=_rational(data.get("lambda2", {}), f"{path}.lambda2"),
        )

    for key in ("r1", "r3", "lambda2"):
        if key in data:
            raise ConfigError(f"{path}.{key}", "a chain derives its functions from xi")
    if "xi" in data:
        xi = _complexes(data["xi"], f"{path}.xi")
        if "L" in data and _int(data["L"], f"{path}.L") != len(xi):
            raise ConfigError(f"{path}.L", f"does not match the {len(xi)} inhomogeneities")
    elif "L" in data:
        xi = tuple(XXXChain.homogeneous(_int(data["L"], f"{path}.L", minimum=1), c).xi)
    else:
        raise ConfigError(f"{path}.xi", "a chain needs xi or L")
    if not xi:
        raise ConfigError(f"{path}.xi", "at least one site")
    eps = Coupling(c).eps_dist
    for j in range(len(xi)):
        for k in range(j):
            if abs(xi[j] - xi[k]) < eps:
                raise ConfigError(f"{path}.xi[{j}]", f"coincides with xi[{k}]")
    return ModelConfig(kind, c, xi=xi)


def parse_solver(value: Any, sector: tuple[int, int], path: str = "$.solver") -> SolverConfig:
    data = _object(value, path, _fields("solver"))
    a, b = sector
    modes = None
    if "modes" in data:
        raw = _list(data["modes"], f"{path}.modes", 2)
        l_modes = tuple(_int(x, f"{path}.modes[0][{i}]") for i, x in enumerate(_list(raw[0], f"{path}.modes[0]", a)))
        m_modes = tuple(_int(x, f"{path}.modes[1][{i}]") for i, x in enumerate(_list(raw[1], f"{path}.modes[1]", b)))
        modes = (l_modes, m_modes)
    seeds = None
    if "seeds" in data:
        parsed = []
        for i, seed in enumerate(_list(data["seeds"], f"{path}.seeds")):
            seed_path = f"{path}.seeds[{i}]"
            entry = _object(seed, seed_path, _fields("solver", "seeds", "items"))
            parsed.append((_complexes(entry.get("u", []), f"{seed_path}.u", a), _complexes(entry.get("v", []), f"{seed_path}.v", b)))
        seeds = tuple(parsed)
    return SolverConfig(
        n_random=_int(data.get("n_random", N_RANDOM_SEEDS), f"{path}.n_random", minimum=schema_at("solver", "n_random")["minimum"]),
        max_iter=_int(data.get("max_iter", MAX_ITER), f"{path}.max_iter", minimum=schema_at("solver", "max_iter")["minimum"]),
        tol=_positive(data.get("tol", TOL_NEWTON), f"{path}.tol"),
        modes=modes,
        seeds=seeds,
    )


def parse_task(value: Any, path: str = "$.task") -> TaskConfig:
    data = _object(value, path, _fields("task"))
    defaults = TaskConfig()
    s = tuple(_int(x, f"{path}.s[{i}]", 1, 3) for i, x in enumerate(_list(data.get("s", list(defaults.s)), f"{path}.s")))
    z = _complexes(data["z"], f"{path}.z") if "z" in data else defaults.z
    states = tuple(_string(x, f"{path}.states[{i}]") for i, x in enumerate(_list(data.get("states", []), f"{path}.states")))
    pairs = []
    for i, pair in enumerate(_list(data.get("pairs", []), f"{path}.pairs")):
        first, second = _list(pair, f"{path}.pairs[{i}]", 2)
        pairs.append((_string(first, f"{path}.pairs[{i}][0]"), _string(second, f"{path}.pairs[{i}][1]")))
    sites = tuple(_int(x, f"{path}.sites[{i}]", minimum=1) for i, x in enumerate(_list(data.get("sites", []), f"{path}.sites")))
    kappa = _twist(data["kappa"], f"{path}.kappa") if "kappa" in data else defaults.kappa
    bounds = schema_at("task", "lemma_n")
    lemma_n = _int(data.get("lemma_n", defaults.lemma_n), f"{path}.lemma_n", bounds["minimum"], bounds["maximum"])
    return TaskConfig(s, z, states, tuple(pairs), sites, kappa, lemma_n)


def parse_output(value: Any, path: str = "$.output") -> OutputConfig:
    data = _object(value, path, _fields("output"))
    out = data.get("path")
    if out is not None:
        out = _string(out, f"{path}.path")
    try:
        fmt = OutputFormat(data.get("format", OutputFormat.JSON.value))
    except ValueError:
        raise ConfigError(f"{path}.format", f"expected one of {[f.value for f in OutputFormat]}")
    return OutputConfig(out, fmt)


def parse_config(value: Any) -> RunConfig:
    """
    Validate a decoded JSON document and build the run configuration

    Parameters
    ----------
    value : Any
        The decoded document

    Returns
    -------
    RunConfig
        The validated configuration

    Raises
    ------
    ConfigError
        With the JSON path of the first offending field
    """
    data = _object(value, "$", _fields())
    if "model" not in data:
        raise ConfigError("$.model", "missing")
    model = parse_model(data["model"])
    sector_raw = _list(data.get("sector", [1, 0]), "$.sector", 2)
    a, b = (_int(x, f"$.sector[{i}]", minimum=0) for i, x in enumerate(sector_raw))
    if model.kind is ModelKind.CHAIN and b > a:
        raise ConfigError("$.sector[1]", f"b = {b} exceeds a = {a}, the chain has no states there")
    if model.kind is ModelKind.CHAIN and a > len(model.xi):
        raise ConfigError("$.sector[0]", f"a = {a} exceeds the chain length {len(model.xi)}")
    return RunConfig(
        model=model,
        sector=(a, b),
        twist=_twist(data["twist"], "$.twist") if "twist" in data else Twist.identity(),
        solver=parse_solver(data.get("solver", {}), (a, b)),
        task=parse_task(data.get("task", {})),
        output=parse_output(data.get("output", {})),
        seed=_int(data.get("seed", 0), "$.seed", minimum=schema_at("seed")["minimum"]),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("$", f"cannot read {path}: {e}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    logger.info("loaded configuration from %s", path)
    return parse_config(document)


def with_overrides(config: RunConfig, seed: int | None = None, out: str | None = None, fmt: str | None = None) -> RunConfig:
    """Command-line flags take precedence over the file."""
    if seed is not None:
        config = replace(config, seed=seed)
    if out is not None:
        config = replace(config, output=replace(config.output, path=out))
    if fmt is not None:
        config = replace(config, output=replace(config.output, format=OutputFormat(fmt)))
    return config
