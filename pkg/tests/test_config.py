import logging

import pytest

from app.config import DEFAULT_GADGET_DIR, DEFAULT_SEED, get_settings, setup_logging
from app.errors import InputError


def test_defaults(monkeypatch):
    for name in ("SEED", "PACK_TOL", "MAX_DENOMINATOR_BITS", "JOBS", "LOG_LEVEL", "GADGET_DIR"):
        monkeypatch.delenv(f"CANONCONV_{name}", raising=False)
    s = get_settings()
    assert s.seed == DEFAULT_SEED
    assert s.pack_tol == 1e-10
    assert s.max_denominator_bits == 48
    assert s.jobs == 1
    assert s.gadget_dir == DEFAULT_GADGET_DIR


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("CANONCONV_SEED", "7")
    monkeypatch.setenv("CANONCONV_JOBS", "3")
    monkeypatch.setenv("CANONCONV_PACK_TOL", "1e-9")
    s = get_settings()
    assert (s.seed, s.jobs, s.pack_tol) == (7, 3, 1e-9)


@pytest.mark.parametrize(
    "name, value",
    [("PACK_TOL", "-1"), ("JOBS", "0"), ("MAX_DENOMINATOR_BITS", "8"), ("SEED", "many")],
)
def test_invalid_values_raise_input_error(monkeypatch, name, value):
    monkeypatch.setenv(f"CANONCONV_{name}", value)
    with pytest.raises(InputError):
        get_settings()


def test_settings_are_cached(monkeypatch):
    first = get_settings()
    monkeypatch.setenv("CANONCONV_SEED", "99")
    assert get_settings() is first


def test_setup_logging_level():
    setup_logging("debug")
    assert logging.getLogger().level == logging.DEBUG
    setup_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING
