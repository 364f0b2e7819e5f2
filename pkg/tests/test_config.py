import pytest

from moprompt.config import ConfigError, RunConfig, load_config


def write(tmp_path, text):
    p = tmp_path / "run.toml"
    p.write_text(text, encoding="utf-8")
    return p


def test_full_file(tmp_path):
    cfg = load_config(write(tmp_path, """
[run]
framework = "evoprompt"
population_size = 6
generations = 3
seed = 7
output_dir = "out"

[evaluation]
strategy = "few"
n_shots = 3
n_per_class = 20

[generator]
kind = "mock"
temperature = 0.9

[evaluator]
kind = "landscape"
"""))
    assert (cfg.framework, cfg.population_size, cfg.generations, cfg.seed) == ("evoprompt", 6, 3, 7)
    assert cfg.strategy == "few" and cfg.n_shots == 3
    assert cfg.generator.temperature == 0.9
    assert cfg.evaluator.kind == "landscape" and cfg.evaluator.temperature == 0.0
    assert cfg.evaluator.max_output_tokens == 16


def test_defaults():
    cfg = RunConfig().validate()
    assert cfg.population_size == 10 and cfg.generations == 10 and cfg.framework == "moprompt"


@pytest.mark.parametrize("body,field", [
    ('[run]\nframework = "ga"', "run.framework"),
    ("[run]\npopulation_size = 1", "run.population_size"),
    ("[run]\ngenerations = 0", "run.generations"),
    ('[evaluation]\nstrategy = "many"', "evaluation.strategy"),
    ('[evaluation]\nstrategy = "few"\nn_shots = 9', "evaluation.n_shots"),
    ('[generator]\nkind = "http"', "generator.url"),
    ('[generator]\nkind = "landscape"', "generator.kind"),
    ("[run]\ncolour = 1", "run.colour"),
    ("[extras]\nx = 1", "extras"),
    ("[run\n", "<file>"),
])
def test_bad_config_names_field(tmp_path, body, field):
    with pytest.raises(ConfigError) as err:
        load_config(write(tmp_path, body))
    assert err.value.field == field
    assert field in str(err.value)


def test_dict_roundtrip():
    cfg = RunConfig(framework="evoprompt", seed=3)
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg
