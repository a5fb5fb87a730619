import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional
from urllib.parse import urlparse

TEMPLATE_VERSION = "dronebench-prompt/1"


class ConfigError(ValueError):
    pass


def _check_url(name: str, url: str) -> None:
    parts = urlparse(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ConfigError(f"{name} must be an http(s) URL, got {url!r}")


@dataclass
class AgentConfig:
    harness_url: str
    model_base_url: Optional[str] = None
    api_key: Optional[str] = None
    model: str = "gpt-4o"
    max_steps: int = 40
    prompt_template_version: str = TEMPLATE_VERSION
    timeout_s: float = 10.0
    retries: int = 3
    force_reset: bool = False
    seed: Optional[int] = None
    # policy-specific settings, e.g. the scripted policy's plan
    policy: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_url("harness_url", self.harness_url)
        if self.model_base_url is not None:
            _check_url("model_base_url", self.model_base_url)
        if not isinstance(self.max_steps, int) or self.max_steps < 1:
            raise ConfigError("max_steps must be an integer >= 1")
        if self.retries < 1:
            raise ConfigError("retries must be >= 1")
        self.harness_url = self.harness_url.rstrip("/")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], **overrides: Any) -> "AgentConfig":
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(merged) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**merged)

    @classmethod
    def from_file(cls, path: Path, **overrides: Any) -> "AgentConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f), **overrides)

    def public(self) -> Dict[str, Any]:
        """The config as written to transcripts, with the key redacted."""
        d = asdict(self)
        if d["api_key"]:
            d["api_key"] = "***"
        return d
