"""Plain-text run configuration: key = value lines grouped by [section] headers.

Keys before any header, or under [common], apply to every subcommand; keys under
a [<subcommand>] header apply to that subcommand only. Command-line flags
override file values. Lines starting with # or ; are comments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

COMMON = "common"
TRUE = {"1", "true", "yes", "on"}
FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class Entry:
    section: str
    key: str
    value: str
    line: int
    source: str


def parse_config(text: str, source: str = "<config>") -> list:
    """Entries of a key=value config text, in file order."""
    out = []
    section = COMMON
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"{source}:{n}: malformed section header {line!r}")
            section = line[1:-1].strip().lower()
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{source}:{n}: expected key = value, got {line!r}")
        out.append(Entry(section, key, value.strip(), n, source))
    return out


def load_config(path) -> list:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}") from None
    return parse_config(text, str(p))


def to_bool(entry: Entry) -> bool:
    v = entry.value.lower()
    if v in TRUE:
        return True
    if v in FALSE:
        return False
    raise ConfigError(f"{entry.source}:{entry.line}: field {entry.key}: expected a boolean, got {entry.value!r}")


@dataclass
class RunConfig:
    """The resolved settings of one run, recorded next to its outputs."""

    command: str
    function: str = ""
    window: tuple = ()
    seed: int = 0
    threads: int = 1
    out_dir: str = "."
    step: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, "function": self.function, "window": list(self.window),
                "seed": self.seed, "threads": self.threads, "out_dir": self.out_dir, "step": self.step,
                "params": self.params}
