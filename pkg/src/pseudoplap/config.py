"""Plain-text run configuration: bracketed sections of key = value lines.

The parser keeps the source line of every key so downstream validation can
point at the offending file:line.  No nesting, no quoting; '#' or ';' start
a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(Exception):
    """Invalid configuration; message carries path:line where applicable."""


@dataclass
class RawConfig:
    path: str
    sections: dict = field(default_factory=dict)  # section -> {key: (value, line)}
    text: str = ""

    def get(self, section: str, key: str, default=None):
        entry = self.sections.get(section, {}).get(key)
        return entry[0] if entry is not None else default

    def line_of(self, section: str, key: str) -> int:
        return self.sections.get(section, {}).get(key, (None, 0))[1]

    def _convert(self, section, key, default, conv, what):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return conv(raw)
        except ValueError as exc:
            raise ConfigError(
                f"{self.path}:{self.line_of(section, key)}: [{section}] {key}: "
                f"expected {what}, got {raw!r}"
            ) from exc

    def get_float(self, section, key, default=None):
        return self._convert(section, key, default, float, "a number")

    def get_int(self, section, key, default=None):
        return self._convert(section, key, default, int, "an integer")

    def get_bool(self, section, key, default=None):
        def conv(s):
            s = s.lower()
            if s in ("true", "yes", "1", "on"):
                return True
            if s in ("false", "no", "0", "off"):
                return False
            raise ValueError(s)

        return self._convert(section, key, default, conv, "a boolean")

    def get_list(self, section, key, default=None, conv=float):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return [conv(t.strip()) for t in raw.split(",") if t.strip()]
        except ValueError as exc:
            raise ConfigError(
                f"{self.path}:{self.line_of(section, key)}: [{section}] {key}: "
                f"expected a comma-separated list, got {raw!r}"
            ) from exc

    def require(self, section, key, getter="get"):
        val = getattr(self, getter)(section, key)
        if val is None:
            raise ConfigError(f"{self.path}: missing required key [{section}] {key}")
        return val

    def fail(self, section, key, message):
        line = self.line_of(section, key)
        loc = f"{self.path}:{line}" if line else self.path
        raise ConfigError(f"{loc}: [{section}] {key}: {message}")


def parse_config(path) -> RawConfig:
    cfg = RawConfig(path=str(path))
    try:
        with open(path) as fh:
            cfg.text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    section = None
    for lineno, line in enumerate(cfg.text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if not section:
                raise ConfigError(f"{path}:{lineno}: empty section name")
            cfg.sections.setdefault(section, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        if section is None:
            raise ConfigError(f"{path}:{lineno}: key outside any [section]")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in cfg.sections[section]:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r} in [{section}]")
        cfg.sections[section][key] = (value, lineno)
    return cfg
