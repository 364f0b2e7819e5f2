"""Run configuration and its TOML representation.

A config file has a ``[run]`` table plus optional ``[evaluation]``,
``[generator]`` and ``[evaluator]`` tables::

    [run]
    framework = "moprompt"      # or "evoprompt"
    population_size = 10
    generations = 10
    seed = 7
    output_dir = "runs/sabia-few"

    [evaluation]
    strategy = "few"            # "zero" | "few"
    n_shots = 2
    dataset = "data/imdb_pt.jsonl"
    n_per_class = 50
    sample_seed = 0

    [generator]
    kind = "http"               # "mock" | "http"
    url = "https://api.openai.com/v1/chat/completions"
    model = "gpt-4o-mini"
    api_key_env = "OPENAI_API_KEY"

    [evaluator]
    kind = "mock"               # "mock" | "http" | "landscape"
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .llm.templates import DEFAULT_TASK

__all__ = ["ConfigError", "ProviderSettings", "RunConfig", "load_config"]

FRAMEWORKS = ("moprompt", "evoprompt")
STRATEGIES = ("zero", "few")
PROVIDER_KINDS = ("mock", "http", "landscape")


class ConfigError(ValueError):
    """A configuration value is missing or invalid; ``field`` names it."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ProviderSettings:
    kind: str = "mock"
    url: str | None = None
    model: str | None = None
    api_key_env: str | None = "OPENAI_API_KEY"  # "" for keyless servers
    temperature: float = 0.7
    max_output_tokens: int = 128
    max_in_flight: int = 4
    retry_attempts: int = 3
    retry_base_delay: float = 1.0
    timeout: float = 60.0


@dataclass
class RunConfig:
    framework: str = "moprompt"
    population_size: int = 10
    generations: int = 10
    seed: int = 0
    output_dir: str | None = None
    strategy: str = "zero"
    n_shots: int = 2
    dataset: str | None = None
    n_per_class: int = 50
    sample_seed: int = 0
    task_description: str = DEFAULT_TASK
    generator: ProviderSettings = field(default_factory=ProviderSettings)
    evaluator: ProviderSettings = field(default_factory=lambda: ProviderSettings(temperature=0.0, max_output_tokens=16))

    def validate(self) -> "RunConfig":
        if self.framework not in FRAMEWORKS:
            raise ConfigError("run.framework", f"expected one of {FRAMEWORKS}, got {self.framework!r}")
        if not isinstance(self.population_size, int) or self.population_size < 2:
            raise ConfigError("run.population_size", f"must be an integer >= 2, got {self.population_size!r}")
        if not isinstance(self.generations, int) or self.generations < 1:
            raise ConfigError("run.generations", f"must be an integer >= 1, got {self.generations!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigError("evaluation.strategy", f"expected one of {STRATEGIES}, got {self.strategy!r}")
        if self.strategy == "few" and not 1 <= self.n_shots <= 8:
            raise ConfigError("evaluation.n_shots", f"must lie in 1..8, got {self.n_shots!r}")
        if self.n_per_class < 1:
            raise ConfigError("evaluation.n_per_class", "must be positive")
        for name, ps in (("generator", self.generator), ("evaluator", self.evaluator)):
            allowed = PROVIDER_KINDS if name == "evaluator" else PROVIDER_KINDS[:2]
            if ps.kind not in allowed:
                raise ConfigError(f"{name}.kind", f"expected one of {allowed}, got {ps.kind!r}")
            if ps.kind == "http":
                for attr in ("url", "model"):
                    if not getattr(ps, attr):
                        raise ConfigError(f"{name}.{attr}", "required for an http provider")
            if ps.max_in_flight < 1:
                raise ConfigError(f"{name}.max_in_flight", "must be >= 1")
            if ps.retry_attempts < 1:
                raise ConfigError(f"{name}.retry_attempts", "must be >= 1")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        gen = d.pop("generator", None) or {}
        ev = d.pop("evaluator", None) or {}
        cfg = cls(**_pick(cls, d, "run"))
        cfg.generator = ProviderSettings(**_pick(ProviderSettings, gen, "generator"))
        base = {"temperature": 0.0, "max_output_tokens": 16}
        base.update(ev)
        cfg.evaluator = ProviderSettings(**_pick(ProviderSettings, base, "evaluator"))
        return cfg


def _pick(klass, d: dict, section: str) -> dict:
    known = {f.name for f in fields(klass)} - {"generator", "evaluator"}
    for key in d:
        if key not in known:
            raise ConfigError(f"{section}.{key}", "unknown setting")
    return dict(d)


def load_config(path) -> RunConfig:
    """Parse a TOML run file into a validated :class:`RunConfig`."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("<file>", f"invalid TOML: {exc}") from None
    for section in doc:
        if section not in ("run", "evaluation", "generator", "evaluator"):
            raise ConfigError(section, "unknown section")
    flat = {}
    flat.update(doc.get("run", {}))
    flat.update(doc.get("evaluation", {}))
    if "generator" in doc:
        flat["generator"] = doc["generator"]
    if "evaluator" in doc:
        flat["evaluator"] = doc["evaluator"]
    try:
        return RunConfig.from_dict(flat).validate()
    except TypeError as exc:
        raise ConfigError("<file>", str(exc)) from None
