"""Read ScenarioConfig files. YAML is the primary format, JSON is accepted
for generated configs."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union, cast

import srsly
from pydantic import ValidationError

from wnncheck.errors import ConfigError
from wnncheck.types import ScenarioConfig
from wnncheck.util import ensure_path


def read_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read a scenario config from a .yml, .yaml or .json file

    Args:
        path (Union[str, Path]): Path to the config

    Raises:
        ConfigError: If the file is missing, unparsable or fails validation

    Returns:
        ScenarioConfig: Validated config
    """
    path = ensure_path(path)
    if not path.exists():
        raise ConfigError(f"Config file {path} does not exist")
    try:
        if path.suffix == ".json":
            data = srsly.read_json(path)
        else:
            data = srsly.read_yaml(path)
    except Exception as e:
        raise ConfigError(f"Could not parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must be a mapping of sections")
    return config_from_dict(cast(Dict[str, Any], data))


def config_from_dict(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate a config mapping

    Raises:
        ConfigError: With the message of the first violated invariant
    """
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        errors = e.errors()
        first = errors[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ConfigError(
            f"Invalid config at '{loc}': {first['msg']}" if loc else first["msg"]
        ) from e


def write_config(config: ScenarioConfig, path: Union[str, Path]) -> None:
    """Write a config as YAML, the inverse of read_config"""
    srsly.write_yaml(ensure_path(path), config.model_dump(exclude_none=True))


def override_config(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    tol_check: Optional[float] = None,
    checks: Optional[List[str]] = None,
    with_oracles: Optional[bool] = None,
    P: Optional[Union[str, List[List[float]]]] = None,
) -> ScenarioConfig:
    """Apply command-line overrides and validate the result again

    Raises:
        ConfigError: If an override violates an invariant
    """
    data = config.model_dump()
    if seed is not None:
        data["sampling"]["seed"] = seed
    if tol_check is not None:
        data["tolerances"]["tol_check"] = tol_check
    if checks is not None:
        data["run"]["checks"] = checks
    if with_oracles is not None:
        data["run"]["with_oracles"] = with_oracles
    if P is not None:
        data["metric"]["P"] = P
    return config_from_dict(data)


def parse_metric(value: str) -> Union[str, List[List[float]]]:
    """Parse a metric flag: "identity", "diag:a,b,..." or the path of a JSON
    file holding P as a list of rows

    Raises:
        ConfigError: If the value has none of these forms
    """
    if value == "identity":
        return value
    if value.startswith("diag:"):
        try:
            entries = [float(v) for v in value[len("diag:") :].split(",")]
        except ValueError:
            raise ConfigError(f"Cannot parse diagonal metric '{value}'") from None
        return [
            [entries[i] if i == j else 0.0 for j in range(len(entries))]
            for i in range(len(entries))
        ]
    path = Path(value)
    if path.exists():
        return cast(List[List[float]], srsly.read_json(path))
    raise ConfigError(
        f"Metric must be 'identity', 'diag:a,b,...' or a JSON file, got '{value}'"
    )
