import json

import pytest

from dynact.config import (
    config_from_dict,
    config_to_dict,
    default_config,
    dump_config,
    load_config,
)
from dynact.errors import ConfigError


def test_default_config_loads(thorax_config):
    cfg = thorax_config
    assert cfg.scan.num_angles == 660
    assert cfg.scan.num_detectors == 451
    assert cfg.material.lame_lambda == 3460.0
    assert cfg.material.lame_mu == 1480.0
    assert cfg.prior.spine_density == 1850.0
    assert cfg.prior.soft_tissue_density == 1050.0
    assert cfg.motion.amplitude == 0.05
    assert cfg.motion.frequency == 0.04
    assert cfg.motion.offset == 0.95
    assert cfg.motion.drift_coeff == 0.44
    labels = [e.label for e in cfg.phantom.ellipses]
    assert labels.count("lung") == 2
    assert "spine" in labels and "tumour" in labels and "body" in labels


def test_roundtrip_identity(tmp_path, thorax_config):
    p1 = str(tmp_path / "a.json")
    p2 = str(tmp_path / "b.json")
    dump_config(thorax_config, p1)
    cfg2 = load_config(p1)
    dump_config(cfg2, p2)
    assert json.load(open(p1)) == json.load(open(p2))
    assert config_to_dict(cfg2) == config_to_dict(thorax_config)


def test_missing_key_reported():
    raw = config_to_dict(default_config())
    del raw["scan"]["num_angles"]
    with pytest.raises(ConfigError, match="scan.num_angles"):
        config_from_dict(raw)


def test_wrong_type_reported():
    raw = config_to_dict(default_config())
    raw["solver"]["grid_nx"] = "big"
    with pytest.raises(ConfigError, match="solver.grid_nx"):
        config_from_dict(raw)


def test_unsupported_version():
    raw = config_to_dict(default_config())
    raw["version"] = 99
    with pytest.raises(ConfigError, match="version"):
        config_from_dict(raw)


def test_escaping_phantom_rejected():
    raw = config_to_dict(default_config())
    raw["phantom"]["ellipses"][0]["semi_axes"] = [0.99, 0.99]
    with pytest.raises(ConfigError, match="unit disk"):
        config_from_dict(raw)


def test_missing_spine_label_rejected():
    raw = config_to_dict(default_config())
    for e in raw["phantom"]["ellipses"]:
        if e["label"] == "spine":
            e["label"] = ""
    with pytest.raises(ConfigError, match="spine"):
        config_from_dict(raw)


def test_bad_boundary_mode_rejected():
    raw = config_to_dict(default_config())
    raw["boundary"]["mode"] = "wild"
    with pytest.raises(ConfigError, match="mode"):
        config_from_dict(raw)


def test_invalid_json_file(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(str(p))


def test_validation_collects_multiple_problems():
    raw = config_to_dict(default_config())
    raw["solver"]["cfl_safety"] = 2.0
    raw["material"]["lame_mu"] = -1.0
    with pytest.raises(ConfigError) as e:
        config_from_dict(raw)
    msg = str(e.value)
    assert "cfl_safety" in msg and "lame_mu" in msg
