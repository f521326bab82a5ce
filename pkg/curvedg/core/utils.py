# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import contextlib
import hashlib
import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Iterator, Optional, Union

import numpy as np

from .exceptions import Fatal

try:
    from rich.progress import (
        BarColumn,
        Progress,
        TextColumn,
        TimeElapsedColumn,
        TimeRemainingColumn,
    )
except Exception:  # pragma: no cover
    Progress = None  # type: ignore


def _json_default(o: Any) -> Any:
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    return str(o)


class _NullProgress:
    """Stand-in with the subset of rich's Progress API the pipeline uses."""

    def __enter__(self) -> "_NullProgress":
        return self

    def __exit__(self, *exc: Any) -> None:
        return None

    def add_task(self, description: str, total: Optional[float] = None, **_: Any) -> int:
        return 0

    def update(self, task: int, **_: Any) -> None:
        return None


class U:
    @staticmethod
    def die(logger: logging.Logger, msg: str, code: int = 1) -> None:
        logger.error(msg)
        raise Fatal(code, msg)

    @staticmethod
    def ensure_dir(p: Path) -> None:
        p.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def json_dump(obj: Any) -> str:
        try:
            return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)
        except Exception:
            return repr(obj)

    @staticmethod
    def banner(logger: logging.Logger, title: str) -> None:
        line = "─" * max(10, len(title) + 2)
        logger.info(line)
        logger.info(f" {title}")
        logger.info(line)

    @staticmethod
    def sha256_hex(*chunks: Union[bytes, np.ndarray]) -> str:
        h = hashlib.sha256()
        for ch in chunks:
            if isinstance(ch, np.ndarray):
                ch = np.ascontiguousarray(ch).tobytes()
            h.update(ch)
        return h.hexdigest()

    @staticmethod
    def atomic_write_bytes(path: Path, data: bytes) -> None:
        path = Path(path)
        U.ensure_dir(path.parent)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    @staticmethod
    def atomic_write_text(path: Path, text: str, *, encoding: str = "utf-8") -> None:
        U.atomic_write_bytes(path, text.encode(encoding))

    @staticmethod
    @contextlib.contextmanager
    def atomic_open(path: Path, mode: str = "wb") -> Iterator[Any]:
        """Handle on a temporary sibling, renamed over `path` on success."""
        path = Path(path)
        U.ensure_dir(path.parent)
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            text_kw = {} if "b" in mode else {"encoding": "utf-8", "newline": "\n"}
            with open(tmp, mode, **text_kw) as fh:
                yield fh
            tmp.replace(path)
        finally:
            if tmp.exists():
                try:
                    os.unlink(tmp)
                except OSError:
                    pass

    @staticmethod
    def progress(enabled: bool = True) -> Any:
        """rich Progress with the project's column layout, or a no-op when disabled."""
        if not enabled or Progress is None:
            return _NullProgress()
        return Progress(
            TextColumn("{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            TimeRemainingColumn(),
        )

    @staticmethod
    def timer() -> float:
        return time.perf_counter()
