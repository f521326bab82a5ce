# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Error hierarchy. Every failure the CLI can report is a CurveDGError whose
`code` is the process exit status:

    2 config    3 mesh    4 curving    5 numerics    6 file format
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional


def _one_line(s: str, limit: int = 600) -> str:
    s = " ".join((s or "").split())
    return s if len(s) <= limit else s[: limit - 3] + "..."


@dataclass(eq=False)
class CurveDGError(Exception):
    code: int = 1
    msg: str = "error"
    cause: Optional[BaseException] = None
    context: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        self.code = int(self.code)
        self.msg = _one_line(self.msg)
        super().__init__(self.msg)

    def with_context(self, **ctx: Any) -> "CurveDGError":
        self.context = {**(self.context or {}), **ctx}
        return self

    def user_message(self, *, include_context: bool = False, include_cause: bool = False) -> str:
        out = self.msg or type(self).__name__
        if include_context and self.context:
            out += " [" + ", ".join(f"{k}={v!r}" for k, v in sorted(self.context.items())) + "]"
        if include_cause and self.cause is not None:
            out += f" (cause: {type(self.cause).__name__}: {_one_line(str(self.cause))})"
        return out

    def __str__(self) -> str:
        return self.user_message()

    def to_dict(self, *, include_cause: bool = False) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "type": type(self).__name__,
            "code": self.code,
            "message": self.msg,
            "context": dict(self.context or {}),
        }
        if include_cause and self.cause is not None:
            d["cause"] = {"type": type(self.cause).__name__, "message": _one_line(str(self.cause))}
        return d


class Fatal(CurveDGError):
    """Raised by U.die after logging; carries an explicit exit code."""


@dataclass(eq=False)
class ConfigError(CurveDGError):
    """Invalid case file or CLI input, missing files, unmapped boundary tags."""
    code: int = 2
    msg: str = "configuration error"


@dataclass(eq=False)
class MeshError(CurveDGError):
    code: int = 3
    msg: str = "mesh error"


@dataclass(eq=False)
class CurvingError(CurveDGError):
    """Projection, elasticity or curved-Jacobian failures."""
    code: int = 4
    msg: str = "curving error"


@dataclass(eq=False)
class NumericsError(CurveDGError):
    """Inadmissible states, factorization failure, divergence."""
    code: int = 5
    msg: str = "numerics error"


@dataclass(eq=False)
class DomainError(NumericsError):
    """Point outside a reference domain or a degenerate input."""
    msg: str = "domain error"


@dataclass(eq=False)
class FormatError(CurveDGError):
    """Sidecar, state, table or NURBS file: bad magic, version, shape or checksum."""
    code: int = 6
    msg: str = "format error"


def format_exception_for_cli(e: BaseException, *, verbose: int = 0) -> str:
    """-v adds the context, -vv the cause (or the type for foreign exceptions)."""
    if isinstance(e, CurveDGError):
        return e.user_message(include_context=verbose >= 1, include_cause=verbose >= 2)
    text = _one_line(str(e))
    if verbose >= 2:
        return f"{type(e).__name__}: {text}"
    return text or type(e).__name__
