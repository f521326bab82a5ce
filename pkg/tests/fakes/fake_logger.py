# SPDX-License-Identifier: LGPL-3.0-or-later
class FakeLogger:
    """Records (level, formatted message) pairs; accepts %-style args like logging."""

    def __init__(self):
        self.records = []

    def _log(self, level, msg, *args):
        text = str(msg) % args if args else str(msg)
        self.records.append((level, text))

    def log(self, lvl, msg, *a, **k): self._log("trace" if lvl < 10 else "debug", msg, *a)
    def trace(self, msg, *a, **k): self._log("trace", msg, *a)
    def debug(self, msg, *a, **k): self._log("debug", msg, *a)
    def info(self, msg, *a, **k): self._log("info", msg, *a)
    def warning(self, msg, *a, **k): self._log("warning", msg, *a)
    def error(self, msg, *a, **k): self._log("error", msg, *a)

    def messages(self, level):
        return [m for lv, m in self.records if lv == level]

    def isEnabledFor(self, _lvl):
        return False
