import json

import pytest

from disputelens.config import AppConfig, build_embedder, build_provider, load_config
from disputelens.errors import ConfigError
from disputelens.gateway import HashingEmbedder, HttpChatProvider, MockChatProvider


def test_defaults():
    config = load_config()
    assert config.provider == "mock"
    assert config.lexical_weight == 0.5
    assert config.top_k == 5
    assert config.embed_dim == 64


def test_file_then_env_then_overrides(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps({"llm_model": "from-file", "retry_max": 9, "top_k": 7}),
        encoding="utf-8",
    )
    monkeypatch.setenv("LLM_MODEL", "from-env")
    monkeypatch.setenv("RETRY_MAX", "2")
    monkeypatch.setenv("MAX_IN_FLIGHT", "11")
    config = load_config(path, top_k=3)
    assert config.llm_model == "from-env"
    assert config.retry_max == 2
    assert config.max_in_flight == 11
    assert config.top_k == 3


def test_bad_env_int(monkeypatch):
    monkeypatch.setenv("RETRY_MAX", "many")
    with pytest.raises(ConfigError):
        load_config()


def test_missing_config_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.json")


def test_unknown_keys_land_in_extra(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"future_flag": True}), encoding="utf-8")
    assert load_config(path).extra == {"future_flag": True}


def test_build_mock_provider_requires_script():
    with pytest.raises(ConfigError):
        build_provider(AppConfig(provider="mock", llm_script_path=""))


def test_build_mock_provider(tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps({"sector:*": "Sector:- Insurance, 102"}), encoding="utf-8")
    provider = build_provider(AppConfig(provider="mock", llm_script_path=str(script)))
    assert isinstance(provider, MockChatProvider)


def test_build_http_provider(monkeypatch):
    monkeypatch.setenv("LLM_BASE_URL", "http://llm.internal:8000")
    config = load_config(provider="http")
    provider = build_provider(config)
    assert isinstance(provider, HttpChatProvider)
    assert provider.base_url == "http://llm.internal:8000"


def test_build_http_provider_requires_url():
    with pytest.raises(ConfigError):
        build_provider(AppConfig(provider="http", llm_base_url=""))


def test_build_embedder_kinds():
    assert isinstance(build_embedder(AppConfig(embedder="hash", embed_dim=32)), HashingEmbedder)
    with pytest.raises(ConfigError):
        build_embedder(AppConfig(embedder="http"))
    with pytest.raises(ConfigError):
        build_embedder(AppConfig(embedder="quantum"))
