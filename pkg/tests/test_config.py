from __future__ import annotations

import pytest

from grouptensor import config
from grouptensor.errors import ParameterError


def test_defaults():
    cfg = config.Config()
    assert cfg.max_group_order >= 6072 and cfg.sl2_max_p == 23
    assert cfg.exact_matching_max_order == 16 and cfg.radical_oracle_max_order == 64


def test_load_file(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text("modrep_max_order = 500\nsl2_max_p = 13\n")
    cfg = config.load(path)
    assert cfg.modrep_max_order == 500 and cfg.sl2_max_p == 13
    assert cfg.tensor_max_order == config.Config().tensor_max_order


@pytest.mark.parametrize("text", ["nonsense_key = 3\n", "modrep_max_order = -1\n", "modrep_max_order = 'x'\n", "= 3"])
def test_load_rejects(tmp_path, text):
    path = tmp_path / "c.toml"
    path.write_text(text)
    with pytest.raises(ParameterError):
        config.load(path)


def test_missing_file(tmp_path):
    with pytest.raises(ParameterError):
        config.load(tmp_path / "nope.toml")


def test_environment(tmp_path, monkeypatch):
    path = tmp_path / "c.toml"
    path.write_text("exact_matching_max_order = 9\n")
    monkeypatch.setenv(config.ENV_VAR, str(path))
    config.set_config(None)
    assert config.get().exact_matching_max_order == 9


def test_override_ignores_none():
    cfg = config.override(clp_max_bits=None, tensor_max_order=7)
    assert cfg.tensor_max_order == 7 and cfg.clp_max_bits == config.Config().clp_max_bits
    assert config.get() is cfg
