"""Simulation configuration and the flat ``key=value`` config-file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from ..errors import ConfigError

MODES = ("blind", "semiblind", "genie_phase")
PATHS = ("freq", "time")
PDPS = ("exponential", "uniform")
CHANNEL_MODES = ("fixed_magnitude", "rayleigh")
NOISE_MODES = ("known", "estimated")
SOURCE_MODELS = ("split", "white")


@dataclass(frozen=True)
class SimConfig:
    M: int = 64
    L: int = 2
    pdp: str = "exponential"
    channel_mode: str = "fixed_magnitude"
    normalize: bool = True
    p: float = 0.5
    Q: int = 8
    n_blocks: tuple[int, ...] = (500,)
    snr_db: tuple[float, ...] = (30.0,)
    runs: int = 100
    master_seed: int = 0
    mode: str = "blind"
    cp_len: int | None = None
    path: str = "freq"
    noise_mode: str = "known"
    denoise_taps: int | None = None
    source_model: str = "split"

    def __post_init__(self):
        object.__setattr__(self, "n_blocks", tuple(int(n) for n in self.n_blocks))
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        checks = [
            (self.M >= 2 and self.M % 2 == 0, f"M must be even and >= 2, got {self.M}"),
            (0 <= self.L < self.M, f"L must lie in [0, M), got {self.L}"),
            (self.pdp in PDPS, f"pdp must be one of {PDPS}"),
            (self.channel_mode in CHANNEL_MODES, f"channel_mode must be one of {CHANNEL_MODES}"),
            (0 < self.p < 1, f"p must lie in (0, 1), got {self.p}"),
            (self.Q >= 2 and self.Q & (self.Q - 1) == 0, f"Q must be a power of two >= 2, got {self.Q}"),
            (len(self.n_blocks) > 0 and min(self.n_blocks) >= 1, "n_blocks needs positive entries"),
            (len(self.snr_db) > 0, "snr_db must not be empty"),
            (self.runs >= 1, "runs must be positive"),
            (0 <= self.master_seed < 2**64, "master_seed must be a 64-bit unsigned integer"),
            (self.mode in MODES, f"mode must be one of {MODES}"),
            (self.cp_len is None or self.cp_len >= self.L, "cp_len must be at least L"),
            (self.path in PATHS, f"path must be one of {PATHS}"),
            (self.noise_mode in NOISE_MODES, f"noise_mode must be one of {NOISE_MODES}"),
            (self.denoise_taps is None or 1 <= self.denoise_taps <= self.M, "denoise_taps must lie in [1, M]"),
            (self.source_model in SOURCE_MODELS, f"source_model must be one of {SOURCE_MODELS}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def resolved_cp_len(self) -> int:
        return self.L if self.cp_len is None else self.cp_len

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["n_blocks"] = list(self.n_blocks)
        out["snr_db"] = list(self.snr_db)
        out["cp_len"] = self.resolved_cp_len
        return out


# Config-file / CLI spellings -> SimConfig field.
ALIASES = {
    "subcarriers": "M",
    "taps": "L",
    "pam_order": "Q",
    "blocks": "n_blocks",
    "snr": "snr_db",
    "seed": "master_seed",
    "cp_len": "cp_len",
    "normalize_channel": "normalize",
    "noise": "noise_mode",
}
_VALUE_ALIASES = {
    "pdp": {"exp": "exponential"},
    "mode": {"genie": "genie_phase"},
    "channel_mode": {"fixed": "fixed_magnitude"},
}
_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _field_name(key: str) -> str:
    key = key.strip().replace("-", "_")
    name = ALIASES.get(key, key)
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    return name


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def coerce(name: str, value: Any) -> Any:
    """Convert a raw (string or list) value into the field's type."""
    try:
        if name in ("n_blocks", "snr_db"):
            items = value if isinstance(value, (list, tuple)) else str(value).split(",")
            conv = int if name == "n_blocks" else float
            return tuple(conv(str(v).strip()) for v in items if str(v).strip())
        if name == "normalize":
            return value if isinstance(value, bool) else _parse_bool(str(value))
        if name in ("cp_len", "denoise_taps"):
            if value is None or str(value).strip().lower() in ("", "none"):
                return None
            return int(value)
        if name in ("M", "L", "Q", "runs", "master_seed"):
            return int(value)
        if name == "p":
            return float(value)
        value = str(value).strip()
        return _VALUE_ALIASES.get(name, {}).get(value, value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def parse_config_text(text: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        name = _field_name(key)
        values[name] = coerce(name, value)
    return values


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def resolve(file_values: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None) -> SimConfig:
    """Defaults, then file values, then explicit overrides (``None`` means unset)."""
    merged: dict[str, Any] = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            name = _field_name(key)
            merged[name] = coerce(name, value)
    try:
        return replace(SimConfig(), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
