# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np

from fakes.fake_logger import FakeLogger

from curvedg.core.exceptions import CurvingError
from curvedg.core.validation_suite import ValidationSuite


def _jacobian_check(ctx):
    jmin = np.asarray(ctx["jmin"])
    if np.any(jmin <= 0.0):
        raise CurvingError(msg=f"{int(np.sum(jmin <= 0.0))} elements inverted")
    return {"min_jacobian": float(jmin.min())}


def _fit_check(ctx):
    if ctx["deviation"] > 1e-6:
        raise CurvingError(msg=f"deviation {ctx['deviation']:.1e}")
    return {"deviation": ctx["deviation"]}


def _suite(logger):
    suite = ValidationSuite(logger, show_progress=False)
    suite.add_check("positive_jacobian", _jacobian_check, critical=True, tags=["geometry"])
    suite.add_check("surface_fit", _fit_check, description="surface nodes on target", tags=["surface"])
    return suite


def test_all_checks_pass():
    log = FakeLogger()
    res = _suite(log).run_all({"jmin": [0.5, 0.2], "deviation": 1e-9})

    assert res["ok"] is True
    assert res["failed_critical"] is False
    assert res["results"]["positive_jacobian"]["result"] == {"min_jacobian": 0.2}
    assert res["stats"]["passed"] == 2
    assert any("Validation summary" in m for m in log.messages("info"))


def test_noncritical_failure_warns_and_continues():
    log = FakeLogger()
    res = _suite(log).run_all({"jmin": [0.5], "deviation": 1e-3})

    assert res["failed_critical"] is False
    assert res["ok"] is False
    assert res["results"]["surface_fit"]["passed"] is False
    assert "deviation" in res["results"]["surface_fit"]["error"]
    assert any("surface_fit" in m for m in log.messages("warning"))


def test_critical_failure_stops_the_run():
    log = FakeLogger()
    res = _suite(log).run_all({"jmin": [0.5, -0.1], "deviation": 1e-3})

    assert res["failed_critical"] is True
    assert "surface_fit" not in res["results"]
    assert "1 elements inverted" in res["results"]["positive_jacobian"]["error"]
    assert log.messages("error")


def test_critical_failure_without_stop_runs_everything():
    res = _suite(FakeLogger()).run_all({"jmin": [-1.0], "deviation": 0.0}, stop_on_critical=False)

    assert res["failed_critical"] is True
    assert res["ok"] is False
    assert res["results"]["surface_fit"]["passed"] is True


def test_skip_by_name_and_tag():
    suite = _suite(FakeLogger())
    res = suite.run_all({"jmin": [-1.0], "deviation": 1.0, "skip_checks": ["positive_jacobian"], "skip_tags": ["surface"]})

    assert res["ok"] is True
    assert res["stats"]["skipped"] == 2
    assert res["results"]["surface_fit"]["skipped"] is True


def test_tracebacks_only_on_request():
    suite = _suite(FakeLogger())
    ctx = {"jmin": [-1.0], "deviation": 0.0}
    assert "traceback" not in suite.run_all(ctx)["results"]["positive_jacobian"]
    assert "CurvingError" in suite.run_all(ctx, show_tracebacks=True)["results"]["positive_jacobian"]["traceback"]
