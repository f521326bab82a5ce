# SPDX-License-Identifier: LGPL-3.0-or-later
import logging

import pytest

from fakes.fake_logger import FakeLogger

from curvedg.core.logger import TRACE, Log


@pytest.mark.parametrize(
    "verbose,quiet,level",
    [
        (0, 0, logging.INFO),
        (1, 0, logging.INFO),
        (2, 0, logging.DEBUG),
        (3, 0, TRACE),
        (3, 1, logging.WARNING),
        (0, 2, logging.ERROR),
    ],
)
def test_level_from_flags(verbose, quiet, level):
    assert Log._level_from_flags(verbose, quiet) == level


def test_setup_writes_detailed_log_file(tmp_path):
    path = tmp_path / "logs" / "run.log"
    logger = Log.setup(2, str(path), color=False, logger_name="curvedg.test_setup")
    logger.debug("residual=%.1e", 1e-3)
    for h in logger.handlers:
        h.flush()

    text = path.read_text(encoding="utf-8")
    assert "residual=1.0e-03" in text
    assert "curvedg.test_setup" in text


def test_setup_replaces_handlers():
    name = "curvedg.test_replace"
    Log.setup(0, None, logger_name=name)
    logger = Log.setup(0, None, quiet=1, logger_name=name)
    assert len(logger.handlers) == 1
    assert logger.level == logging.WARNING


def test_helpers_route_to_levels():
    log = FakeLogger()
    Log.step(log, "curving")
    Log.warn(log, "surface fit")
    Log.kv(log, "level", {"p": 2, "dt": 0.1})
    Log.trace(log, "iter %d", 7)

    assert any("curving" in m for m in log.messages("info"))
    assert any("surface fit" in m for m in log.messages("warning"))
    assert "level: p=2 dt=0.1" in log.messages("info")
    assert log.messages("trace") == ["iter 7"]
