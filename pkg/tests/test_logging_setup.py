import logging

from big_ssl.services.logging_setup import LOG_FORMAT, build_logger


def test_build_logger_installs_handlers_once(tmp_path):
    log_file = tmp_path / "run.log"
    first = build_logger("big_ssl.tests.build", log_file=log_file, console=False)
    second = build_logger("big_ssl.tests.build", log_file=log_file, console=False)
    assert first is second
    assert len(first.handlers) == 1
    first.info("trial finished")
    first.handlers[0].flush()
    assert "INFO - trial finished" in log_file.read_text(encoding="utf-8")


def test_build_logger_console_uses_project_format():
    logger = build_logger("big_ssl.tests.console", level=logging.WARNING)
    assert logger.level == logging.WARNING
    assert len(logger.handlers) == 1
    handler = logger.handlers[0]
    assert isinstance(handler, logging.StreamHandler)
    assert handler.formatter._fmt == LOG_FORMAT
