#!/usr/bin/env python3
"""
Unit tests for logger.py module
"""

import pytest
import sys
import os
import logging
from io import StringIO

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from logger import (
    QmonoLogger, ColoredFormatter, setup_logging, get_logger, level_for,
    is_verbose, is_debug, timed
)


def make_record(level, msg, name='qmono.trees'):
    return logging.LogRecord(
        name=name, level=level, pathname='', lineno=0,
        msg=msg, args=(), exc_info=None
    )


class TestColoredFormatter:
    """Tests for ColoredFormatter class"""

    def test_plain_message(self):
        formatter = ColoredFormatter(use_colors=False)
        assert formatter.format(make_record(logging.INFO, 'tree has 2 leaves')) == 'tree has 2 leaves'

    def test_debug_records_carry_module(self):
        formatter = ColoredFormatter(use_colors=False)
        result = formatter.format(make_record(logging.DEBUG, 'blow-up fork (1,2,1)'))
        assert result == '[trees] blow-up fork (1,2,1)'

    def test_debug_indent_follows_depth(self):
        formatter = ColoredFormatter(use_colors=False)
        record = make_record(logging.DEBUG, 'reflection fork')
        record.depth = 2
        assert formatter.format(record) == '[trees]     reflection fork'

    def test_indent_only_on_debug(self):
        formatter = ColoredFormatter(use_colors=False)
        record = make_record(logging.INFO, 'tree has 2 leaves')
        record.depth = 3
        assert formatter.format(record) == 'tree has 2 leaves'

    def test_no_colors_off_terminal(self, monkeypatch):
        monkeypatch.setattr(sys.stderr, 'isatty', lambda: False, raising=False)
        formatter = ColoredFormatter(use_colors=True)
        result = formatter.format(make_record(logging.WARNING, 'chart radius shrunk'))
        assert '\033[' not in result


class TestQmonoLogger:
    """Tests for QmonoLogger singleton class"""

    def test_singleton_pattern(self):
        assert QmonoLogger() is QmonoLogger()

    def test_loggers_are_namespaced(self):
        logger = QmonoLogger().get_logger('geometry')
        assert isinstance(logger, logging.Logger)
        assert logger.name == 'qmono.geometry'

    def test_same_module_same_logger(self):
        assert get_logger('same_module') is get_logger('same_module')

    def test_different_modules_different_loggers(self):
        assert get_logger('module_a') is not get_logger('module_b')


class TestSetupLogging:
    """Tests for setup_logging function"""

    @pytest.mark.parametrize('verbosity,level', [
        (0, logging.WARNING),
        (1, logging.INFO),
        (2, logging.DEBUG),
        (5, logging.DEBUG),
    ])
    def test_levels(self, verbosity, level):
        setup_logging(verbosity=verbosity)
        assert get_logger('test_levels').level == level
        assert level_for(verbosity) == level

    def test_existing_loggers_reconfigured(self):
        logger = get_logger('test_reconfigured')
        setup_logging(verbosity=2)
        assert logger.level == logging.DEBUG
        setup_logging(verbosity=0)
        assert logger.level == logging.WARNING

    def test_log_file_receives_debug(self, tmp_path):
        path = tmp_path / 'logs' / 'qmono.log'
        setup_logging(verbosity=0, log_file=str(path), use_colors=False)
        logger = get_logger('test_file')
        logger.debug('fork decision')
        setup_logging(verbosity=0)
        assert 'fork decision' in path.read_text()

    def test_no_propagation(self):
        setup_logging(verbosity=0)
        assert get_logger('test_propagate').propagate is False


class TestConvenienceFunctions:
    """Tests for module-level convenience functions"""

    def test_verbosity_flags(self):
        setup_logging(verbosity=0)
        assert not is_verbose()
        assert not is_debug()
        setup_logging(verbosity=1)
        assert is_verbose()
        assert not is_debug()
        setup_logging(verbosity=2)
        assert is_debug()
        setup_logging(verbosity=0)


class TestTimed:
    """Tests for phase timing"""

    def test_logs_label_at_info(self):
        setup_logging(verbosity=1, use_colors=False)
        logger = get_logger('test_timed')
        stream = StringIO()
        handler = logging.StreamHandler(stream)
        logger.addHandler(handler)
        with timed(logger, 'normalize'):
            pass
        logger.removeHandler(handler)
        setup_logging(verbosity=0)
        assert stream.getvalue().startswith('normalize: ')
        assert stream.getvalue().rstrip().endswith(' s')

    def test_logs_on_error(self):
        setup_logging(verbosity=1, use_colors=False)
        logger = get_logger('test_timed_error')
        stream = StringIO()
        handler = logging.StreamHandler(stream)
        logger.addHandler(handler)
        with pytest.raises(ValueError):
            with timed(logger, 'verify'):
                raise ValueError('boom')
        logger.removeHandler(handler)
        setup_logging(verbosity=0)
        assert 'verify: ' in stream.getvalue()


class TestLogOutput:
    """Tests for actual log output"""

    def test_info_suppressed_at_default(self):
        setup_logging(verbosity=0, use_colors=False)
        logger = get_logger('test_output')

        stream = StringIO()
        handler = logging.StreamHandler(stream)
        handler.setFormatter(logging.Formatter('%(message)s'))
        logger.addHandler(handler)

        logger.info('hidden')
        logger.warning('shown')

        assert stream.getvalue() == 'shown\n'
        logger.removeHandler(handler)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
