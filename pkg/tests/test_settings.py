import pytest
from pydantic import ValidationError

from src.config.settings import Settings
from src.models.schemas import ALL_ENGINES, Engine, OutputFormat


def test_defaults():
    s = Settings(_env_file=None)
    assert s.engine == ALL_ENGINES
    assert s.selected_engines == list(Engine)
    assert s.output_format is OutputFormat.PLAIN
    assert s.bounds.render() == "T=8,S=5,deg=8"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("KAPPA_PSI_ENGINE", "Alpha")
    monkeypatch.setenv("KAPPA_PSI_VERIFY_MAX_T", "4")
    s = Settings(_env_file=None)
    assert s.selected_engines == [Engine.ALPHA]
    assert s.bounds.max_t == 4


@pytest.mark.parametrize("field,value", [("engine", "nope"), ("output_format", "xml"), ("log_level", "LOUD")])
def test_rejects_unknown_names(field, value):
    with pytest.raises(ValidationError):
        Settings(_env_file=None, **{field: value})
