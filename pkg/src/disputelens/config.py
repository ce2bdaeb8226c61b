"""Runtime configuration: JSON file, environment overrides, flag overrides.

Environment variables: LLM_BASE_URL, LLM_API_KEY, LLM_MODEL, EMBED_BASE_URL,
EMBED_MODEL, MAX_IN_FLIGHT, RETRY_MAX.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .gateway import (
    ChatProvider,
    Embedder,
    HashingEmbedder,
    HttpChatProvider,
    HttpEmbedder,
    MockChatProvider,
    load_script,
)


@dataclass(frozen=True)
class AppConfig:
    # providers: "http" talks to llm_base_url, "mock" replays llm_script_path
    provider: str = "mock"
    llm_base_url: str = ""
    llm_api_key: str = ""
    llm_model: str = "default"
    llm_script_path: str = ""
    judge_model: str = "judge"
    # embedder: "hash" is the deterministic local embedder, "http" a remote one
    embedder: str = "hash"
    embed_dim: int = 64
    embed_base_url: str = ""
    embed_model: str = ""
    retry_max: int = 3
    max_in_flight: int = 4
    timeout: float = 60.0
    # corpus and index layout; index_dir empty means build indexes at startup
    judgments_path: str = "corpus/judgments.jsonl"
    cases_path: str = "corpus/cases.jsonl"
    index_dir: str = ""
    # retrieval defaults
    lexical_weight: float = 0.5
    top_k: int = 5
    # service
    cors_origin: str = ""
    static_dir: str = ""
    verbose: bool = False
    extra: dict = field(default_factory=dict)


_ENV_MAP = {
    "LLM_BASE_URL": "llm_base_url",
    "LLM_API_KEY": "llm_api_key",
    "LLM_MODEL": "llm_model",
    "EMBED_BASE_URL": "embed_base_url",
    "EMBED_MODEL": "embed_model",
}
_ENV_INT_MAP = {"MAX_IN_FLIGHT": "max_in_flight", "RETRY_MAX": "retry_max"}


def load_config(path: str | Path | None = None, **overrides) -> AppConfig:
    """Layered config: defaults < file < environment < explicit overrides."""
    values: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        values.update(data)
    for env_name, attr in _ENV_MAP.items():
        if os.environ.get(env_name):
            values[attr] = os.environ[env_name]
    for env_name, attr in _ENV_INT_MAP.items():
        if os.environ.get(env_name):
            try:
                values[attr] = int(os.environ[env_name])
            except ValueError:
                raise ConfigError(f"{env_name} must be an integer") from None
    values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f for f in AppConfig.__dataclass_fields__ if f != "extra"}
    extra = {k: v for k, v in values.items() if k not in known}
    kwargs = {k: v for k, v in values.items() if k in known}
    try:
        return AppConfig(extra=extra, **kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def build_provider(config: AppConfig) -> ChatProvider:
    if config.provider == "mock":
        if not config.llm_script_path:
            raise ConfigError("mock provider needs llm_script_path (a JSON script file)")
        return MockChatProvider(load_script(config.llm_script_path))
    if config.provider == "http":
        if not config.llm_base_url:
            raise ConfigError("http provider needs llm_base_url (or LLM_BASE_URL)")
        return HttpChatProvider(
            base_url=config.llm_base_url,
            api_key=config.llm_api_key,
            retry_max=config.retry_max,
            timeout=config.timeout,
            max_in_flight=config.max_in_flight,
            verbose=config.verbose,
        )
    raise ConfigError(f"unknown provider kind {config.provider!r}")


def build_embedder(config: AppConfig) -> Embedder:
    if config.embedder == "hash":
        return HashingEmbedder(dim=config.embed_dim)
    if config.embedder == "http":
        if not config.embed_base_url or not config.embed_model:
            raise ConfigError("http embedder needs embed_base_url and embed_model")
        return HttpEmbedder(
            base_url=config.embed_base_url,
            model=config.embed_model,
            api_key=config.llm_api_key,
            timeout=config.timeout,
            retry_max=config.retry_max,
        )
    raise ConfigError(f"unknown embedder kind {config.embedder!r}")


def with_overrides(config: AppConfig, **kwargs) -> AppConfig:
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})
