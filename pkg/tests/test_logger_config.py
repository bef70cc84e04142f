from __future__ import annotations

import logging

import pytest

from logger_config import setup_logger


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


def test_console_only():
    assert setup_logger("abc", level=logging.INFO) is None
    root = logging.getLogger()
    assert root.level == logging.INFO
    assert len(root.handlers) == 1


def test_file_handler(tmp_path):
    log_file = setup_logger("s1", level=logging.WARNING, log_dir=tmp_path / "logs")
    assert log_file == tmp_path / "logs" / "signrank_s1.log"

    logging.getLogger("qualtensor.rank").debug("[rank] probe.event | value=1")
    for handler in logging.getLogger().handlers:
        handler.flush()
    text = log_file.read_text(encoding="utf-8")
    assert "[rank] probe.event | value=1" in text
    assert "[logger] logger.initialised | session=s1" in text


def test_repeated_calls_replace_handlers(tmp_path):
    setup_logger("a", log_dir=tmp_path)
    setup_logger("b", log_dir=tmp_path)
    file_handlers = [h for h in logging.getLogger().handlers if isinstance(h, logging.FileHandler)]
    assert len(file_handlers) == 1
    assert file_handlers[0].baseFilename.endswith("signrank_b.log")
