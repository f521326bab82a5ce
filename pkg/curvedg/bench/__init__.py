# SPDX-License-Identifier: LGPL-3.0-or-later
from .layout_bench import (
    BENCH_HEADER,
    BenchConfig,
    BenchReport,
    BenchRow,
    bench_mesh,
    format_bench_report,
    random_admissible_values,
    run_layout_bench,
    write_bench_report,
)

__all__ = [
    "BENCH_HEADER",
    "BenchConfig",
    "BenchReport",
    "BenchRow",
    "bench_mesh",
    "format_bench_report",
    "random_admissible_values",
    "run_layout_bench",
    "write_bench_report",
]
