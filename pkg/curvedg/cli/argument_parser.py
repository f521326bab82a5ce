# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence, Tuple

from .. import __version__
from ..config.case_config import SECTIONS
from ..config.config_loader import Config
from ..core.exceptions import ConfigError
from ..core.logger import Log, c
from ..core.utils import U
from .help_texts import FEATURE_SUMMARY, YAML_EXAMPLE

COMMANDS = ("curve", "solve", "export", "bench")


class HelpFormatter(argparse.RawDescriptionHelpFormatter, argparse.ArgumentDefaultsHelpFormatter):
    """Keeps the case-file example verbatim and shows defaults."""


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {v}")
    return v


def _add_global_flags(p: argparse.ArgumentParser) -> None:
    """Flags the pre-parse needs: case files, logging, dumps."""
    p.add_argument("--config", action="append", default=[], help="YAML/JSON case file (repeatable; later overrides earlier).")
    p.add_argument("-v", "--verbose", action="count", default=0, help="Verbosity: -v context, -vv debug, -vvv trace.")
    p.add_argument("-q", "--quiet", action="count", default=0, help="Less output: -q warnings only, -qq errors only.")
    p.add_argument("--log-file", dest="log_file", default=None, help="Also write a detailed log to this file.")
    p.add_argument("--dump-config", action="store_true", help="Print the merged case file and exit.")
    p.add_argument("--dump-args", action="store_true", help="Print the final parsed args and exit.")


def build_parser() -> argparse.ArgumentParser:
    epilog = (
        c("Case file example:\n", "cyan", ["bold"])
        + c(YAML_EXAMPLE, "cyan")
        + "\n"
        + c("Feature summary:\n", "cyan", ["bold"])
        + c(FEATURE_SUMMARY, "cyan")
    )

    p = argparse.ArgumentParser(
        prog="curvedg",
        description=c("curvedg: high-order DG Euler solver on curved tetrahedral meshes", "green", ["bold"]),
        formatter_class=HelpFormatter,
        epilog=epilog,
    )

    _add_global_flags(p)
    p.add_argument("--version", action="version", version=__version__)

    # ------------------------------------------------------------------
    # Execution
    # ------------------------------------------------------------------
    p.add_argument("--threads", type=_positive_int, default=1, help="Worker threads for element kernels.")
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="Fixed element chunks and ordered reductions: bitwise identical runs for any thread count.",
    )
    p.add_argument("--progress", action="store_true", help="Show rich progress bars.")
    p.add_argument(
        "--output-dir",
        dest="output_dir",
        default=None,
        help="Override output.directory of the case file.",
    )

    # ------------------------------------------------------------------
    # Subcommands (optional: the case file may name one with `command:`)
    # ------------------------------------------------------------------
    sub = p.add_subparsers(dest="command", metavar="{curve,solve,export,bench}")

    pc = sub.add_parser("curve", help="Curve the mesh near a surface and write the sidecar.", formatter_class=HelpFormatter)
    pc.add_argument("--mesh", dest="mesh_path", default=None, help="Gmsh mesh (overrides mesh.path).")
    pc.add_argument("--degree", dest="curve_degree", type=_positive_int, default=None, help="DG degree of the sidecar nodes.")
    pc.add_argument("--sidecar", dest="sidecar_path", default=None, help="Sidecar output path (overrides output.sidecar).")

    ps = sub.add_parser("solve", help="March to steady state over the p-schedule.", formatter_class=HelpFormatter)
    ps.add_argument("--mesh", dest="mesh_path", default=None, help="Gmsh mesh (overrides mesh.path).")
    ps.add_argument("--curved-mesh", dest="curved_mesh_path", default=None, help="Curved-mesh sidecar (overrides curved_mesh).")
    ps.add_argument("--straight", action="store_true", help="Ignore any curved-mesh sidecar.")
    ps.add_argument("--state", dest="state_path", default=None, help="State output path (overrides output.state).")

    pe = sub.add_parser("export", help="Write a legacy VTK file from a state file.", formatter_class=HelpFormatter)
    pe.add_argument("--mesh", dest="mesh_path", default=None, help="Gmsh mesh (overrides mesh.path).")
    pe.add_argument("--curved-mesh", dest="curved_mesh_path", default=None, help="Curved-mesh sidecar (overrides curved_mesh).")
    pe.add_argument("--straight", action="store_true", help="Ignore any curved-mesh sidecar.")
    pe.add_argument("--state", dest="state_path", default=None, help="State input path (overrides output.state).")
    pe.add_argument("--vtk", dest="vtk_path", default=None, help="VTK output path (overrides output.vtk).")

    pb = sub.add_parser("bench", help="Time the RHS kernels for padded vs unpadded layouts.", formatter_class=HelpFormatter)
    pb.add_argument("--degree", dest="bench_degree", type=_positive_int, default=None, help="DG degree (overrides bench.degree).")
    pb.add_argument("--elements", dest="bench_elements", type=_positive_int, default=None, help="Element count (overrides bench.elements).")
    pb.add_argument("--repetitions", dest="bench_repetitions", type=int, default=None, help="Timed repetitions (overrides bench.repetitions).")
    pb.add_argument(
        "--bench-threads",
        dest="bench_threads",
        type=_positive_int,
        nargs="+",
        default=None,
        help="Thread counts to time (overrides bench.threads).",
    )
    pb.add_argument("--report", dest="bench_report", default=None, help="CSV report path (overrides output.bench).")

    return p


def _given(v: Any) -> bool:
    return v is not None and not (isinstance(v, str) and not v.strip())


def _merged_get(args: argparse.Namespace, conf: Dict[str, Any], key: str) -> Any:
    v = getattr(args, key, None)
    return v if _given(v) else conf.get(key)


def _mesh_defined(args: argparse.Namespace, conf: Dict[str, Any]) -> bool:
    if _given(getattr(args, "mesh_path", None)):
        return True
    mesh = conf.get("mesh")
    return isinstance(mesh, dict) and (_given(mesh.get("path")) or mesh.get("builtin") is not None)


def validate_args(args: argparse.Namespace, conf: Dict[str, Any], logger: logging.Logger) -> None:
    """
    Resolve the subcommand (CLI first, then `command:` from the case file) and
    check what each one needs before any heavy work starts.
    """
    cmd = _merged_get(args, conf, "command")
    if not _given(cmd):
        U.die(logger, f"No command given. Pass one of {list(COMMANDS)} or set `command:` in the case file.", ConfigError.code)
    cmd = str(cmd).strip().lower()
    if cmd not in COMMANDS:
        U.die(logger, f"Unknown command={cmd!r}. Use one of {list(COMMANDS)}.", ConfigError.code)
    args.command = cmd

    if cmd in ("curve", "solve", "export") and not _mesh_defined(args, conf):
        U.die(logger, f"command={cmd}: missing `mesh:` (path or builtin) in the case file or CLI --mesh", ConfigError.code)

    if cmd == "curve":
        curving = conf.get("curving")
        if not isinstance(curving, dict) or not (_given(curving.get("box_lo")) and _given(curving.get("box_hi"))):
            U.die(logger, "command=curve: missing `curving.box_lo` / `curving.box_hi` in the case file", ConfigError.code)

    if cmd == "bench" and getattr(args, "bench_repetitions", None) is not None and args.bench_repetitions < 0:
        U.die(logger, f"command=bench: --repetitions must be >= 0, got {args.bench_repetitions}", ConfigError.code)


def parse_args_with_config(
    argv: Optional[Sequence[str]] = None,
    logger: Optional[logging.Logger] = None,
) -> Tuple[argparse.Namespace, Dict[str, Any], logging.Logger]:
    """
    Two passes. The first reads only the global flags, enough to set up
    logging and merge the case files; top-level case scalars then become
    parser defaults, so the second full pass lets the command line win.
    """
    argv = list(sys.argv[1:] if argv is None else argv)

    pre = argparse.ArgumentParser(add_help=False)
    _add_global_flags(pre)
    early, _ = pre.parse_known_args(argv)

    if logger is None:
        logger = Log.setup(early.verbose, early.log_file, quiet=early.quiet)

    conf: Dict[str, Any] = Config.load_many(logger, early.config) if early.config else {}
    if early.dump_config:
        print(U.json_dump(conf))
        raise SystemExit(0)

    parser = build_parser()
    Config.apply_as_defaults(logger, parser, conf, strict=True, reserved=SECTIONS)
    args = parser.parse_args(argv)
    if early.dump_args:
        print(U.json_dump(vars(args)))
        raise SystemExit(0)

    validate_args(args, conf, logger)
    return args, conf, logger
