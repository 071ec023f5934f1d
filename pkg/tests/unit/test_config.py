import pytest
from pydantic import ValidationError

from app.core import config
from app.core.config import Settings


def test_defaults():
    s = Settings(_env_file=None)
    assert s.SPEED_OF_SOUND == 343.0
    assert s.DEFAULT_RADIUS_M == 0.0875
    assert s.EMA_NUM_THREADS == 0


def test_thread_cap_from_environment(monkeypatch):
    monkeypatch.setenv("EMA_NUM_THREADS", "3")
    assert Settings(_env_file=None).EMA_NUM_THREADS == 3
    monkeypatch.setenv("EMA_NUM_THREADS", "")
    assert Settings(_env_file=None).EMA_NUM_THREADS == 0


def test_negative_thread_cap(monkeypatch):
    monkeypatch.setenv("EMA_NUM_THREADS", "-2")
    with pytest.raises(ValidationError):
        Settings(_env_file=None)


def test_worker_count(monkeypatch):
    monkeypatch.setattr(config.settings, "EMA_NUM_THREADS", 2)
    assert config.worker_count() == 2
    monkeypatch.setattr(config.settings, "EMA_NUM_THREADS", 0)
    assert config.worker_count() >= 1
