# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, List, Mapping, Optional

try:
    from termcolor import colored as _colored  # type: ignore
except Exception:  # pragma: no cover
    _colored = None

# below DEBUG: per-iteration residuals, per-element fallbacks
TRACE = 5
logging.addLevelName(TRACE, "TRACE")

ROOT_LOGGER = "curvedg"

# level -> (marker, color)
_LEVELS = {
    "TRACE": ("🧬", "cyan"),
    "DEBUG": ("🔍", "blue"),
    "INFO": ("✅", "green"),
    "WARNING": ("⚠️", "yellow"),
    "ERROR": ("💥", "red"),
    "CRITICAL": ("🧨", "red"),
}


def c(text: str, color: Optional[str] = None, attrs: Optional[List[str]] = None, *, enable: bool = True) -> str:
    """Colorize text if termcolor is available and enabled."""
    if not (enable and color and _colored is not None):
        return text
    try:
        return _colored(text, color=color, attrs=attrs or [])
    except Exception:
        return text


def _unicode_ok(stream: Any) -> bool:
    try:
        "✅".encode(getattr(stream, "encoding", None) or "utf-8")
        return True
    except Exception:
        return False


class CaseFormatter(logging.Formatter):
    """
    `HH:MM:SS ✅ INFO     message`. With `detail` the logger name and source
    location follow the level; the file handler always runs with detail.
    """

    def __init__(self, *, color: bool, detail: bool, show_ms: bool, unicode: bool = True):
        super().__init__()
        self.color = color
        self.detail = detail
        self.show_ms = show_ms
        self.unicode = unicode

    def formatTime(self, record: logging.LogRecord, datefmt: Optional[str] = None) -> str:
        stamp = time.strftime("%H:%M:%S", time.localtime(record.created))
        return f"{stamp}.{int(record.msecs):03d}" if self.show_ms else stamp

    def format(self, record: logging.LogRecord) -> str:
        marker, color = _LEVELS.get(record.levelname, ("•", None))
        if not self.unicode:
            marker = "·"
        level = c(f"{record.levelname:<8}", color, enable=self.color)
        where = f" [{record.name} {record.module}:{record.lineno}]" if self.detail else ""
        msg = record.getMessage()
        if record.levelno >= logging.WARNING:
            msg = c(msg, color, attrs=["bold"], enable=self.color)
        line = f"{self.formatTime(record)} {marker} {level}{where} {msg}"
        if record.exc_info:
            tb = "\n".join("  " + ln for ln in self.formatException(record.exc_info).splitlines())
            line += "\n" + c(tb, "red", enable=self.color)
        return line


class Log:
    @staticmethod
    def _level_from_flags(verbose: int, quiet: int) -> int:
        """-q WARNING, -qq ERROR, default INFO, -vv DEBUG, -vvv TRACE; quiet wins."""
        if quiet:
            return logging.ERROR if quiet >= 2 else logging.WARNING
        return {0: logging.INFO, 1: logging.INFO, 2: logging.DEBUG}.get(verbose, TRACE)

    @staticmethod
    def step(logger: logging.Logger, msg: str) -> None:
        logger.info("➡️  %s", msg)

    @staticmethod
    def ok(logger: logging.Logger, msg: str) -> None:
        logger.info("✅ %s", msg)

    @staticmethod
    def warn(logger: logging.Logger, msg: str) -> None:
        logger.warning("⚠️  %s", msg)

    @staticmethod
    def trace(logger: logging.Logger, msg: str, *args: Any) -> None:
        logger.log(TRACE, msg, *args)

    @staticmethod
    def kv(logger: logging.Logger, title: str, values: Mapping[str, Any]) -> None:
        """One info line of key=value pairs in insertion order."""
        logger.info("%s: %s", title, " ".join(f"{k}={v}" for k, v in values.items()))

    @staticmethod
    def setup(
        verbose: int = 0,
        log_file: Optional[str] = None,
        *,
        quiet: int = 0,
        color: Optional[bool] = None,
        logger_name: str = ROOT_LOGGER,
    ) -> logging.Logger:
        """
        Configure the `curvedg` logger: stderr always, plus `log_file` when given.
        Calling again replaces the handlers, so tests and repeated CLI runs in
        one process do not duplicate lines.
        """
        logger = logging.getLogger(logger_name)
        logger.propagate = False
        level = Log._level_from_flags(verbose, quiet)
        logger.setLevel(level)

        for h in list(logger.handlers):
            logger.removeHandler(h)
            h.close()

        tty = bool(getattr(sys.stderr, "isatty", lambda: False)())
        sh = logging.StreamHandler(stream=sys.stderr)
        sh.setFormatter(
            CaseFormatter(
                color=tty if color is None else bool(color),
                detail=verbose >= 2,
                show_ms=verbose >= 3,
                unicode=_unicode_ok(sys.stderr),
            )
        )
        logger.addHandler(sh)

        if log_file:
            fp = Path(log_file).expanduser().resolve()
            fp.parent.mkdir(parents=True, exist_ok=True)
            fh = logging.FileHandler(fp, encoding="utf-8")
            fh.setFormatter(CaseFormatter(color=False, detail=True, show_ms=True))
            logger.addHandler(fh)

        logger.debug("Logging at %s (pid=%d)", logging.getLevelName(level), os.getpid())
        return logger
