# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import logging
import time
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from .utils import U

# A check returns a JSON-friendly result or raises to signal failure.
CheckFunc = Callable[[Dict[str, Any]], Any]


@dataclass
class Check:
    name: str
    func: CheckFunc
    critical: bool = False
    description: Optional[str] = None
    tags: List[str] = field(default_factory=list)

    def skipped_by(self, context: Dict[str, Any]) -> bool:
        names = context.get("skip_checks") or ()
        tags = context.get("skip_tags") or ()
        return self.name in names or any(t in tags for t in self.tags)


@dataclass
class Outcome:
    check: Check
    seconds: float = 0.0
    result: Any = None
    error: Optional[str] = None
    tb: Optional[str] = None
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return self.error is None

    def to_json(self, *, with_traceback: bool) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "passed": self.passed,
            "critical": self.check.critical,
            "duration_s": round(self.seconds, 3),
            "skipped": self.skipped,
            "tags": list(self.check.tags),
        }
        if self.passed:
            d["result"] = "skipped" if self.skipped else self.result
        else:
            d["error"] = self.error or "unknown error"
            if with_traceback and self.tb:
                d["traceback"] = self.tb
        return d


class ValidationSuite:
    """
    Ordered quality gates over a shared context dict, run after curving
    (Jacobian positivity, surface fit, free-stream divergence).

    The report goes to validation.json as is. With stop_on_critical a failed
    critical check ends the run and `ok` means "nothing failed"; without it,
    every check runs and `ok` only tracks critical failures.
    Skips: context["skip_checks"] (names) and context["skip_tags"].
    """

    def __init__(self, logger: logging.Logger, *, show_progress: bool = True):
        self.logger = logger
        self.show_progress = show_progress
        self.checks: List[Check] = []

    def add_check(
        self,
        name: str,
        check_func: CheckFunc,
        critical: bool = False,
        *,
        description: Optional[str] = None,
        tags: Optional[List[str]] = None,
    ) -> None:
        self.checks.append(Check(name, check_func, critical, description, list(tags or [])))

    def _evaluate(self, check: Check, context: Dict[str, Any]) -> Outcome:
        if check.skipped_by(context):
            self.logger.debug("Validation skipped: %s", check.name)
            return Outcome(check, skipped=True)
        t0 = time.monotonic()
        try:
            out = check.func(context)
            return Outcome(check, time.monotonic() - t0, result=out)
        except Exception as e:
            return Outcome(check, time.monotonic() - t0, error=str(e) or type(e).__name__, tb=traceback.format_exc())

    def run_all(
        self,
        context: Dict[str, Any],
        *,
        stop_on_critical: bool = True,
        show_tracebacks: bool = False,
    ) -> Dict[str, Any]:
        """Returns {"ok", "failed_critical", "results": {name: {...}}, "stats": {...}}."""
        started = time.monotonic()
        outcomes: List[Outcome] = []

        with U.progress(self.show_progress) as bar:
            task = bar.add_task("Validating", total=len(self.checks))
            for check in self.checks:
                bar.update(task, description=f"Validating: {check.description or check.name}")
                o = self._evaluate(check, context)
                outcomes.append(o)
                bar.update(task, advance=1)
                if o.passed:
                    if not o.skipped:
                        self.logger.debug("Validation passed: %s (%.2fs)", check.name, o.seconds)
                    continue
                msg = f"Validation failed: {check.name} ({o.seconds:.2f}s) - {o.error}"
                if not check.critical:
                    self.logger.warning(msg)
                    continue
                self.logger.error(msg)
                if show_tracebacks and o.tb:
                    self.logger.error(o.tb.rstrip())
                if stop_on_critical:
                    break

        skipped = sum(o.skipped for o in outcomes)
        failed = [o.check.name for o in outcomes if not o.passed]
        failed_critical = any(not o.passed and o.check.critical for o in outcomes)
        report = {
            "ok": not failed if stop_on_critical else not failed_critical,
            "failed_critical": failed_critical,
            "results": {o.check.name: o.to_json(with_traceback=show_tracebacks) for o in outcomes},
            "stats": {
                "total": len(self.checks),
                "passed": len(outcomes) - skipped - len(failed),
                "failed": len(failed),
                "skipped": skipped,
                "duration_s": round(time.monotonic() - started, 3),
            },
        }
        s = report["stats"]
        self.logger.info(
            "Validation summary: total=%d passed=%d failed=%d skipped=%d duration=%.2fs ok=%s",
            s["total"], s["passed"], s["failed"], s["skipped"], s["duration_s"], report["ok"],
        )
        if failed:
            self.logger.warning("Failed validations: %s", ", ".join(failed))
        return report
