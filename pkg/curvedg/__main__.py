# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
import sys
import traceback
from typing import Any, Optional, Sequence

from .cli.argument_parser import parse_args_with_config
from .core.exceptions import CurveDGError, format_exception_for_cli
from .orchestrator.orchestrator import Orchestrator

EXIT_INTERRUPTED = 130


def _report(logger: Any, level: int, msg: str) -> None:
    if logger is None:
        print(msg, file=sys.stderr)
    elif isinstance(logger, logging.Logger):
        logger.log(level, msg)
    else:
        getattr(logger, logging.getLevelName(level).lower())(msg)


def run(argv: Optional[Sequence[str]] = None, logger: Any = None) -> int:
    """Parse, dispatch and map failures to exit codes. Returns the code instead of exiting."""
    try:
        args, conf, logger = parse_args_with_config(argv, logger)
    except CurveDGError as e:
        # U.die has logged it whenever a logger existed
        if logger is None:
            _report(None, logging.ERROR, f"💥 ERROR    {e}")
        return e.code
    except KeyboardInterrupt:
        _report(logger, logging.WARNING, "Interrupted.")
        return EXIT_INTERRUPTED

    verbose = int(getattr(args, "verbose", 0) or 0)
    try:
        return int(Orchestrator(logger, args, conf).run())
    except CurveDGError as e:
        _report(logger, logging.ERROR, f"💥 {type(e).__name__}: {format_exception_for_cli(e, verbose=max(1, verbose))}")
        return e.code
    except KeyboardInterrupt:
        _report(logger, logging.WARNING, "Interrupted.")
        return EXIT_INTERRUPTED
    except Exception as e:
        _report(logger, logging.ERROR, f"💥 unhandled {type(e).__name__}: {e}")
        _report(logger, logging.DEBUG, traceback.format_exc())
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
