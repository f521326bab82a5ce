# SPDX-License-Identifier: LGPL-3.0-or-later
# -*- coding: utf-8 -*-
"""
Case-file loading for the two-phase CLI parse.

Files are YAML or JSON mappings. Several files merge in order (later wins,
nested mappings merge, lists replace). Only top-level scalars reach argparse;
the physics sections are typed later by CaseConfig.
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Set

from ..core.exceptions import ConfigError, Fatal
from ..core.utils import U

try:
    import yaml  # type: ignore

    YAML_AVAILABLE = True
except Exception:
    YAML_AVAILABLE = False

CONFIG_SUFFIXES = (".yaml", ".yml", ".json")
# mapping keys below these paths are user data (tag names), not config keys
_VERBATIM_KEYS = ("boundary",)
_TRUTHY = ("1", "true", "yes", "y", "on")


def _is_glob(entry: str) -> bool:
    return any(ch in entry for ch in "*?") or ("[" in entry and "]" in entry)


class Config:
    """Case file loader: expand, parse, normalise, merge, feed argparse."""

    @staticmethod
    def expand_configs(logger: logging.Logger, configs: Iterable[str]) -> List[str]:
        """
        Directories contribute every case file below them, globs their matches
        (both sorted), plain paths pass through. Duplicates keep their first slot.
        """
        out: List[str] = []
        for entry in configs:
            p = Path(entry).expanduser()
            if p.is_dir():
                hits = [f for f in sorted(p.rglob("*")) if f.is_file() and f.suffix.lower() in CONFIG_SUFFIXES]
            elif _is_glob(entry):
                hits = [Path(x) for x in sorted(glob.glob(str(p)))]
                if not hits:
                    U.die(logger, f"Config pattern {entry!r} matched no files", ConfigError.code)
            else:
                hits = [p]
            for f in hits:
                r = str(f.resolve())
                if r not in out:
                    out.append(r)
        logger.debug("Case files: %s", out)
        return out

    @staticmethod
    def load_one(logger: logging.Logger, path: str) -> Dict[str, Any]:
        p = Path(path).expanduser().resolve()
        if not p.is_file():
            U.die(logger, Config._missing_message(p), ConfigError.code)
        try:
            text = p.read_text(encoding="utf-8")
            if p.suffix.lower() == ".json":
                data = json.loads(text)
            elif YAML_AVAILABLE:
                data = yaml.safe_load(text) or {}
            else:
                U.die(logger, f"{p.name}: YAML case files need PyYAML (pip install PyYAML)", ConfigError.code)
        except Fatal:
            raise
        except (ValueError, OSError) as e:
            U.die(logger, f"Cannot parse case file {p}: {e}", ConfigError.code)
        except Exception as e:
            if YAML_AVAILABLE and isinstance(e, yaml.YAMLError):
                U.die(logger, f"Invalid YAML in case file {p}: {e}", ConfigError.code)
            raise

        if not isinstance(data, dict):
            U.die(logger, f"Case file must hold a mapping, got {type(data).__name__}: {p}", ConfigError.code)
        out = Config._canonical_command(Config._normalize_keys(data))
        logger.debug("Loaded %s:\n%s", p, U.json_dump(out))
        return out

    @staticmethod
    def merge_dicts(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
        out: Dict[str, Any] = dict(base)
        for k, v in override.items():
            if isinstance(out.get(k), dict) and isinstance(v, dict):
                out[k] = Config.merge_dicts(out[k], v)
            else:
                out[k] = v
        return out

    @staticmethod
    def load_many(logger: logging.Logger, paths: Iterable[str]) -> Dict[str, Any]:
        files = Config.expand_configs(logger, paths)
        missing = [f for f in files if not Path(f).is_file()]
        if missing:
            U.die(logger, Config._missing_message(Path(missing[0]), more=len(missing) - 1), ConfigError.code)
        conf: Dict[str, Any] = {}
        for f in files:
            conf = Config.merge_dicts(conf, Config.load_one(logger, f))
        return conf

    @staticmethod
    def apply_as_defaults(
        logger: logging.Logger,
        parser: argparse.ArgumentParser,
        conf: Mapping[str, Any],
        *,
        strict: bool = False,
        reserved: Iterable[str] = (),
    ) -> None:
        """
        Top-level scalars whose key is an argparse dest (global or subcommand)
        become that option's default, coerced with the option's type. With
        `strict`, any other top-level scalar not listed in `reserved` is an error.
        """
        if not conf:
            return
        subparsers = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
        scopes = [("global", parser)] + [(f"sub:{n}", sp) for a in subparsers for n, sp in a.choices.items()]

        if strict:
            dests: Set[str] = {a.dest for _, sp in scopes for a in sp._actions if a.dest}
            allowed = dests | set(reserved)
            unknown = sorted(k for k, v in conf.items() if not isinstance(v, dict) and k not in allowed)
            if unknown:
                U.die(logger, f"Unknown top-level case keys: {unknown}", ConfigError.code)

        for scope, sp in scopes:
            for act in sp._actions:
                if isinstance(act, argparse._SubParsersAction) or act.dest not in conf:
                    continue
                val = Config._coerce(logger, act, conf[act.dest])
                logger.debug("[%s] default %s: %r -> %r", scope, act.dest, act.default, val)
                act.default = val
                act.required = False

    # ------------------------------------------------------------------ helpers

    @staticmethod
    def _normalize_keys(obj: Any, *, verbatim: bool = False) -> Any:
        """dash-keys -> underscore, except the tag names under `boundary:`."""
        if isinstance(obj, dict):
            out: Dict[str, Any] = {}
            for k, v in obj.items():
                key = str(k) if verbatim else str(k).replace("-", "_")
                out[key] = Config._normalize_keys(v, verbatim=not verbatim and key in _VERBATIM_KEYS)
            return out
        if isinstance(obj, list):
            return [Config._normalize_keys(x) for x in obj]
        return obj

    @staticmethod
    def _canonical_command(d: Dict[str, Any]) -> Dict[str, Any]:
        """`cmd:` is accepted as an alias of `command:`."""
        if "cmd" in d:
            d.setdefault("command", d["cmd"])
            del d["cmd"]
        if isinstance(d.get("command"), str):
            d["command"] = d["command"].strip().lower()
        return d

    @staticmethod
    def _coerce(logger: logging.Logger, act: argparse.Action, raw: Any) -> Any:
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            return raw.strip().lower() in _TRUTHY if isinstance(raw, str) else bool(raw)
        if act.type is None:
            return raw

        def one(x: Any) -> Any:
            try:
                return act.type(x)  # type: ignore[misc]
            except (TypeError, ValueError, argparse.ArgumentTypeError) as e:
                U.die(logger, f"Case key {act.dest}={x!r}: {e}", ConfigError.code)

        if isinstance(raw, (list, tuple)):
            return [one(x) for x in raw]
        return [one(raw)] if act.nargs in ("+", "*") else one(raw)

    @staticmethod
    def _missing_message(path: Path, *, more: int = 0) -> str:
        lines = [f"Case file not found: {path}" + (f" (and {more} more)" if more else "")]
        parent = path.parent
        if parent.is_dir():
            near = sorted(f.name for ext in CONFIG_SUFFIXES for f in parent.glob(f"*{ext}"))
            if near:
                lines.append(f"Case files in {parent}: {', '.join(near[:10])}" + (" ..." if len(near) > 10 else ""))
        else:
            lines.append(f"Directory {parent} does not exist")
        return "\n".join(lines)
