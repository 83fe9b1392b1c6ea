"""Flat ``key = value`` scenario files.

One pair per line, UTF-8, ``#`` starts a comment. Keys are the flattened
:class:`NetworkConfig` fields; anything missing takes its default.
"""

from __future__ import annotations

from pathlib import Path

from .model import ConfigError, NetworkConfig

_DEFAULTS = NetworkConfig().flat()


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        where = f"{path or '<config>'}:{line}" if line else str(path or "<config>")
        super().__init__(f"{where}: {message}")
        self.line = line


def _coerce(key: str, raw: str):
    default = _DEFAULTS[key]
    if isinstance(default, str):
        return raw
    if isinstance(default, int):
        try:
            return int(raw, 0)
        except ValueError:
            value = float(raw)
            if not value.is_integer():
                raise ValueError(f"{key} needs an integer, got {raw!r}") from None
            return int(value)
    return float(raw)


def parse_config_text(text: str, path=None) -> NetworkConfig:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", lineno, path)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ParseError(f"unknown key {key!r}", lineno, path)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno, path)
        try:
            values[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {exc}", lineno, path) from None
        lines[key] = lineno
    try:
        return NetworkConfig().with_(**values)
    except ConfigError as exc:
        at = [lines[k] for k in exc.keys if k in lines]
        raise ParseError(str(exc), max(at) if at else None, path) from None


def parse_config(path) -> NetworkConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), path)


def format_config(config: NetworkConfig, header: dict[str, object] | None = None) -> str:
    """Serialise ``config`` so that :func:`parse_config_text` returns an equal config."""
    out = [f"# {k}: {v}" for k, v in (header or {}).items()]
    out.append(f"# d0 = {config.d0!r} (derived, not a key)")
    for key, value in config.flat().items():
        out.append(f"{key} = {value}" if isinstance(value, str) else f"{key} = {value!r}")
    return "\n".join(out) + "\n"
