"""
Tests for configuration profiles, logging setup and the toolkit factory.
"""
import json
import logging

import pytest

from engulfing import init_toolkit
from engulfing.config import Config, DevelopmentConfig, TestingConfig, get_config
from engulfing.helpers.error_handlers import InvalidParameterError
from engulfing.helpers.logging_config import (HumanReadableFormatter, RunIDFilter, StructuredFormatter, get_run_id,
                                              setup_logging)


@pytest.mark.unit
class TestConfigSelection:
    """Test profile lookup"""

    def test_by_name(self):
        assert get_config('testing') is TestingConfig
        assert get_config('unknown') is DevelopmentConfig

    def test_by_environment(self, monkeypatch):
        monkeypatch.setenv('ENGULF_ENV', 'testing')
        assert get_config() is TestingConfig

    def test_testing_profile(self):
        assert TestingConfig.SAMPLES == 2000
        assert TestingConfig.GRID == 200


@pytest.mark.unit
class TestConfigBuilders:
    """Test validated sampler and refinement settings"""

    def test_sampler_defaults(self):
        sampler = Config.sampler_config()
        assert sampler.samples == Config.SAMPLES
        assert sampler.box == Config.BOX

    def test_overrides_win_and_none_is_ignored(self):
        sampler = TestingConfig.sampler_config(seed=5, box=None, samples=10)
        assert sampler.seed == 5
        assert sampler.samples == 10
        assert sampler.box == TestingConfig.BOX

    def test_refine(self):
        refine = TestingConfig.refine_config(rounds=3)
        assert refine.grid == 200
        assert refine.rounds == 3

    def test_invalid_height_range(self):
        with pytest.raises(InvalidParameterError):
            Config.sampler_config(t_min=10.0, t_max=1.0)

    def test_invalid_grid(self):
        with pytest.raises(InvalidParameterError) as exc_info:
            Config.refine_config(grid=2)
        assert exc_info.value.field == 'grid'

    def test_validate_config(self, monkeypatch):
        assert Config.validate_config() == []
        monkeypatch.setattr(Config, 'SAMPLES', 10)
        monkeypatch.setattr(Config, 'T_MAX', 1e-5)
        warnings = Config.validate_config()
        assert len(warnings) == 2
        assert any('three decades' in w for w in warnings)


@pytest.mark.unit
class TestLogging:
    """Test logging setup and formatters"""

    def _record(self, message='hello'):
        record = logging.LogRecord('engulfing.test', logging.INFO, __file__, 1, message, None, None)
        RunIDFilter().filter(record)
        return record

    def test_run_id(self):
        assert len(get_run_id()) == 12
        assert self._record().run_id == get_run_id()

    def test_structured_formatter(self):
        data = json.loads(StructuredFormatter().format(self._record()))
        assert data['message'] == 'hello'
        assert data['level'] == 'INFO'
        assert data['run_id'] == get_run_id()

    def test_human_formatter(self):
        assert f"[RUN:{get_run_id()}] - hello" in HumanReadableFormatter().format(self._record())

    def test_setup_replaces_handlers(self, restore_logging, tmp_path):
        log_file = tmp_path / 'logs' / 'engulf.log'
        setup_logging('WARNING', log_file, use_json_format=True)
        root = logging.getLogger()
        assert root.level == logging.WARNING
        assert len(root.handlers) == 2
        logging.getLogger('engulfing.test').warning('written')
        for handler in root.handlers:
            handler.flush()
        line = log_file.read_text(encoding='utf-8').strip()
        assert json.loads(line)['message'] == 'written'

    def test_init_toolkit(self, restore_logging):
        cfg = init_toolkit('testing', 'ERROR')
        assert cfg is TestingConfig
        assert logging.getLogger().level == logging.ERROR
