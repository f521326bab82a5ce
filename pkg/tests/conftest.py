# SPDX-License-Identifier: LGPL-3.0-or-later
import os
import sys
from pathlib import Path

_THIS_DIR = Path(__file__).resolve().parent
_REPO_ROOT = _THIS_DIR.parent

if str(_REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(_REPO_ROOT))

os.environ.setdefault("PYTHONPATH", str(_REPO_ROOT))

import pytest  # noqa: E402

RUN_SLOW = os.environ.get("CURVEDG_SLOW", "") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size physics runs (set CURVEDG_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="slow; set CURVEDG_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
