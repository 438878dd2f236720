"""Line-oriented ``key = value`` configuration files.

Top-level keys are :class:`ScenarioConfig` fields (``protocol``, ``n_nodes``,
``spacing`` ...). Dotted keys reach the nested parameter blocks::

    radio.rx_threshold = 3.652e-10
    mac.retry_limit    = 7
    aodv.rrep_wait     = 1.0
    dsdv.update_period = 15
    size.base_p        = 1500
    video.width        = 352       # raw YUV geometry of the input file
    grid.spacings      = 20, 50    # comma-separated axes for ``grid``

``#`` starts a comment. Unknown keys, repeated keys and unparsable values are
errors. Any key can also be set from the environment as
``VIDMANET_<KEY>`` with dots written as double underscores
(``VIDMANET_MAC__RETRY_LIMIT=4``); the environment wins over the file.
"""
from __future__ import annotations

import dataclasses
import enum
import os
import typing
from dataclasses import dataclass, field
from pathlib import Path

from .aodv import AodvParams
from .dsdv import DsdvParams
from .errors import ConfigError
from .grid import GridAxes
from .mac import MacParams
from .phy import RadioParams
from .scenario import ScenarioConfig
from .video import SizeModel

ENV_PREFIX = "VIDMANET_"


@dataclass(frozen=True)
class VideoInput:
    """Geometry of a headerless YUV 4:2:0 file."""

    width: int = 352
    height: int = 288
    bits: int = 8


@dataclass
class FileConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    video: VideoInput = field(default_factory=VideoInput)
    grid: GridAxes = field(default_factory=GridAxes)


# section name -> (attribute on ScenarioConfig or FileConfig, dataclass)
_SCENARIO_SECTIONS = {"radio": RadioParams, "mac": MacParams, "aodv": AodvParams,
                      "dsdv": DsdvParams, "size": SizeModel}
_SCENARIO_ATTR = {"size": "size_model"}
_NESTED = {"radio", "mac", "aodv", "dsdv", "size_model"}
_TRUE, _FALSE = {"1", "true", "yes", "on"}, {"0", "false", "no", "off"}


def _hints(cls) -> dict[str, object]:
    return typing.get_type_hints(cls)


def _parse_scalar(text: str, tp, key: str):
    text = text.strip()
    args = typing.get_args(tp)
    if type(None) in args:  # Optional[...]
        if text.lower() in ("none", ""):
            return None
        (tp,) = [a for a in args if a is not type(None)]
    try:
        if tp is bool:
            low = text.lower()
            if low in _TRUE or low in _FALSE:
                return low in _TRUE
            raise ValueError(text)
        if tp is int:
            return int(text)
        if tp is float:
            return float(text)
        if isinstance(tp, type) and issubclass(tp, enum.Enum):
            return text  # coerced by the owning dataclass
        if tp is str:
            return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {getattr(tp, '__name__', tp)}") from None
    raise ConfigError(f"{key}: unsupported field type {tp}")


def _parse_value(text: str, tp, key: str):
    if typing.get_origin(tp) is tuple:
        (item, _) = typing.get_args(tp)
        parts = [p for p in (s.strip() for s in text.split(",")) if p]
        if len(parts) == 1 and parts[0].lower() == "none":
            return ()
        return tuple(_parse_scalar(p, item, key) for p in parts)
    return _parse_scalar(text, tp, key)


def parse_lines(lines, source: str = "<config>") -> dict[str, str]:
    """Raw ``key -> value`` pairs; syntax errors carry the line number."""
    out: dict[str, str] = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigError(f"{source}:{no}: expected 'key = value'")
        if key in out:
            raise ConfigError(f"{source}:{no}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def env_overrides(environ=None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    return {k[len(ENV_PREFIX):].lower().replace("__", "."): v
            for k, v in environ.items() if k.startswith(ENV_PREFIX)}


def build(pairs: dict[str, str]) -> FileConfig:
    """Apply parsed pairs on top of the defaults; unknown keys are rejected."""
    top: dict[str, object] = {}
    nested: dict[str, dict[str, object]] = {}
    video: dict[str, object] = {}
    grid: dict[str, object] = {}
    scen_hints = _hints(ScenarioConfig)
    for key, text in pairs.items():
        section, dot, name = key.partition(".")
        if not dot:
            if key not in scen_hints or key in _NESTED:
                raise ConfigError(f"unknown key {key!r}")
            top[key] = _parse_value(text, scen_hints[key], key)
            continue
        if section == "video":
            target, hints = video, _hints(VideoInput)
        elif section == "grid":
            target, hints = grid, _hints(GridAxes)
        elif section in _SCENARIO_SECTIONS:
            target = nested.setdefault(_SCENARIO_ATTR.get(section, section), {})
            hints = _hints(_SCENARIO_SECTIONS[section])
        else:
            raise ConfigError(f"unknown section in key {key!r}")
        if name not in hints:
            raise ConfigError(f"unknown key {key!r}")
        target[name] = _parse_value(text, hints[name], key)
    try:
        base = ScenarioConfig()
        blocks = {attr: dataclasses.replace(getattr(base, attr), **vals) for attr, vals in nested.items()}
        scenario = ScenarioConfig(**top, **blocks)
        return FileConfig(scenario, VideoInput(**video), GridAxes(**grid))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, environ=None) -> FileConfig:
    """Read ``path`` (optional), then layer ``VIDMANET_*`` environment overrides."""
    pairs: dict[str, str] = {}
    if path is not None:
        text = Path(path).read_text()
        pairs = parse_lines(text.splitlines(), str(path))
    pairs.update(env_overrides(environ))
    return build(pairs)


def dump_config(cfg: FileConfig) -> str:
    """Render every setting as ``key = value`` lines that :func:`load_config` reads back."""
    def fmt(v):
        if isinstance(v, enum.Enum):
            return str(v.value)
        if isinstance(v, tuple):
            return ", ".join(fmt(x) for x in v) if v else "none"
        if v is None:
            return "none"
        return repr(v) if isinstance(v, float) else str(v)

    s = cfg.scenario
    lines = [f"{f.name} = {fmt(getattr(s, f.name))}" for f in dataclasses.fields(s)
             if f.name not in _NESTED]
    for section, cls in _SCENARIO_SECTIONS.items():
        block = getattr(s, _SCENARIO_ATTR.get(section, section))
        lines += [f"{section}.{f.name} = {fmt(getattr(block, f.name))}" for f in dataclasses.fields(cls)]
    lines += [f"video.{f.name} = {fmt(getattr(cfg.video, f.name))}" for f in dataclasses.fields(cfg.video)]
    lines += [f"grid.{f.name} = {fmt(getattr(cfg.grid, f.name))}" for f in dataclasses.fields(cfg.grid)]
    return "\n".join(lines) + "\n"
