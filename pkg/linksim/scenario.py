"""
Scenario files and built-in presets.

Format (version 1):

    format-version = 1
    [link]
    channels = 16
    transmitters = 2
    [scheduler]
    name = mcdrr
    quantum = 1518
    [run]
    duration_s = 30
    seed = 1
    [flows]
    0 16 uniform 64 1518
    1 48 fixed 500

`#` starts a comment. Omitted knobs take their defaults.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import ValidationError

from linksim.engine import ns_to_ps, seconds_to_ps, us_to_ps
from linksim.errors import ScenarioParseError, ScenarioValidationError
from linksim.models import FORMAT_VERSION, LinkParams, ScenarioConfig, SchedulerParams
from linksim.traffic import scenario_a_flows, scenario_b_flows

logger = logging.getLogger(__name__)

DEFAULT_DURATION_S = 30.0
FULL_DURATION_S = 600.0


def _preset(name: str, flows: Callable[[int], list], duration_s: float, seed: int) -> ScenarioConfig:
    link = LinkParams()
    return ScenarioConfig(
        name=name,
        link=link,
        flows=flows(link.channels),
        scheduler=SchedulerParams(),
        duration_ps=seconds_to_ps(duration_s),
        seed=seed,
    )


PRESETS: dict[str, Callable[[float, int], ScenarioConfig]] = {
    "paper-a": lambda duration_s, seed: _preset("paper-a", scenario_a_flows, duration_s, seed),
    "paper-b": lambda duration_s, seed: _preset("paper-b", scenario_b_flows, duration_s, seed),
}


def preset(name: str, duration_s: float = DEFAULT_DURATION_S, seed: int = 1) -> ScenarioConfig:
    """W=16, M=2, 1 Gb/s, quantum 1518, VOQ capacity 1000, with the named traffic."""
    try:
        return PRESETS[name](duration_s, seed)
    except KeyError:
        raise ScenarioValidationError(
            f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}"
        ) from None


def _to_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _to_packets(text: str) -> Optional[int]:
    return None if text.lower() == "unlimited" else int(text)


def _to_quantum(text: str) -> Any:
    if "," in text:
        return [int(part) for part in text.split(",")]
    return int(text)


# section -> key -> (destination field, converter)
_KEYS: dict[str, dict[str, tuple[str, Callable[[str], Any]]]] = {
    "link": {
        "channels": ("channels", int),
        "transmitters": ("transmitters", int),
        "line_rate_bps": ("line_rate_bps", int),
        "ifg_bytes": ("ifg_bytes", int),
        "tuning_time_ns": ("tuning_time_ps", lambda v: ns_to_ps(float(v))),
    },
    "scheduler": {
        "name": ("name", str),
        "quantum": ("quantum", _to_quantum),
        "max_packets_per_visit": ("max_packets_per_visit", _to_packets),
        "accrue_quantum_when_busy": ("accrue_quantum_when_busy", _to_bool),
        "voq_capacity": ("voq_capacity", int),
    },
    "run": {
        "duration_s": ("duration_ps", lambda v: seconds_to_ps(float(v))),
        "warmup_s": ("warmup_ps", lambda v: seconds_to_ps(float(v))),
        "seed": ("seed", int),
        "check_invariants": ("check_invariants", _to_bool),
    },
    "output": {
        "directory": ("output_dir", str),
        "prefix": ("output_prefix", str),
    },
}


def _parse_flow(fields: list[str]) -> dict[str, Any]:
    if len(fields) < 3:
        raise ValueError("flow line needs: id mean_interframe_us uniform|fixed ...")
    flow_id, mean_us, dist, *args = fields
    if dist == "uniform":
        if len(args) != 2:
            raise ValueError("uniform needs min_bytes max_bytes")
        size = {"kind": "uniform", "min_bytes": int(args[0]), "max_bytes": int(args[1])}
    elif dist == "fixed":
        if len(args) != 1:
            raise ValueError("fixed needs one size in bytes")
        size = {"kind": "fixed", "size_bytes": int(args[0])}
    else:
        raise ValueError(f"unknown size distribution {dist!r}")
    return {
        "flow_id": int(flow_id),
        "mean_interframe_ps": us_to_ps(float(mean_us)),
        "size": size,
    }


def parse_scenario(text: str, name: str = "custom") -> ScenarioConfig:
    """
    Parse scenario text.

    Raises:
        ScenarioParseError: malformed text, with the offending line number
        ScenarioValidationError: well-formed but inconsistent scenario
    """
    sections: dict[str, dict[str, Any]] = {section: {} for section in _KEYS}
    flows: list[dict[str, Any]] = []
    version: Optional[int] = None
    section: Optional[str] = None
    seen_content = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        if not seen_content:
            seen_content = True
            key, _, value = line.partition("=")
            if key.strip() != "format-version" or not value.strip():
                raise ScenarioParseError(number, "expected 'format-version = 1' first")
            try:
                version = int(value.strip())
            except ValueError:
                raise ScenarioParseError(number, f"bad format-version {value.strip()!r}") from None
            if version != FORMAT_VERSION:
                raise ScenarioParseError(number, f"unsupported format-version {version}")
            continue

        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioParseError(number, f"unterminated section header {line!r}")
            section = line[1:-1].strip()
            if section not in _KEYS and section != "flows":
                raise ScenarioParseError(number, f"unknown section [{section}]")
            continue

        if section is None:
            raise ScenarioParseError(number, "content before the first section")

        if section == "flows":
            try:
                flows.append(_parse_flow(line.split()))
            except ValueError as e:
                raise ScenarioParseError(number, str(e)) from None
            continue

        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ScenarioParseError(number, f"expected 'key = value', got {line!r}")
        if key not in _KEYS[section]:
            raise ScenarioParseError(number, f"unknown key {key!r} in [{section}]")
        field, convert = _KEYS[section][key]
        if field in sections[section]:
            raise ScenarioParseError(number, f"duplicate key {key!r} in [{section}]")
        try:
            sections[section][field] = convert(value)
        except ValueError as e:
            raise ScenarioParseError(number, f"{key}: {e}") from None

    if not seen_content:
        raise ScenarioParseError(1, "empty scenario")

    run = sections["run"]
    data = {
        "name": name,
        "link": sections["link"],
        "scheduler": sections["scheduler"],
        "flows": flows,
        "duration_ps": run.pop("duration_ps", seconds_to_ps(DEFAULT_DURATION_S)),
        **run,
        **sections["output"],
    }
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ScenarioValidationError(str(e)) from e


def load_scenario(
    source: str,
    duration_s: float = DEFAULT_DURATION_S,
    seed: int = 1,
) -> ScenarioConfig:
    """
    Resolve a preset name or read a scenario file.

    `duration_s` and `seed` only apply to presets; files carry their own.
    """
    if source in PRESETS:
        return preset(source, duration_s=duration_s, seed=seed)

    path = Path(source).expanduser()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(None, f"cannot read scenario {path}: {e}") from e
    logger.debug("parsing scenario %s", path)
    return parse_scenario(text, name=path.stem)
