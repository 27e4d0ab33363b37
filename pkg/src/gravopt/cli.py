"""Command-line front end: run / probe / compare / bench.

Settings resolve in three layers: built-in defaults, then the JSON file
given with --config, then explicit flags. The JSON file mirrors GsaConfig
field names one-to-one in snake_case (kernel is either a name string
such as "square" or "power:1.5", or an object {"kind", "exponent",
"epsilon"}); it may additionally carry "function", "repetitions" and
"probe_r_values". Unknown flags and unknown config keys are rejected.

Exit codes: 0 success, 2 usage error, 3 numeric divergence or force
overflow, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .core import DEFAULT_EPSILON, ConfigError, GsaConfig, KernelSpec, validate_config
from .engine import (
    DivergenceError,
    EvaluationError,
    _batch_forces,
    make_rng,
    run,
)
from .experiments import (
    ExperimentPlan,
    format_float,
    run_grid,
    summarize,
    write_probe_csv,
    write_results_csv,
    write_summary_csv,
    write_trace_csv,
)
from .kernels import DEFAULT_PROBE_DISTANCES, ForceOverflowError, probe_exponent
from .objectives import make_objective, objective_names

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

KERNEL_CHOICES = "original, linear, square, power:<q>"

DEFAULTS = {
    "kernel": "original",
    "epsilon": DEFAULT_EPSILON,
    "g0": 100.0,
    "alpha": 20.0,
    "population": 50,
    "dims": 30,
    "max_iters": 1000,
    "seed": 42,
    "function": "sphere",
    "repetitions": 25,
    "deterministic_weights": False,
    "kbest_initial_fraction": 1.0,
    "record_positions": False,
}

_CONFIG_FILE_KEYS = {
    "population",
    "dims",
    "lower_bound",
    "upper_bound",
    "kernel",
    "g0",
    "alpha",
    "max_iters",
    "kbest_initial_fraction",
    "deterministic_weights",
    "seed",
    "record_positions",
    "function",
    "repetitions",
    "probe_r_values",
}

# CLI dest -> canonical settings key
_FLAG_TO_SETTING = {
    "kernel": "kernel",
    "epsilon": "epsilon",
    "g0": "g0",
    "alpha": "alpha",
    "pop": "population",
    "dims": "dims",
    "iters": "max_iters",
    "seed": "seed",
    "function": "function",
    "reps": "repetitions",
    "deterministic": "deterministic_weights",
}


def parse_kernel(text: str, epsilon: float) -> KernelSpec:
    """Kernel from its CLI name: original | linear | square | power:<q>."""
    token = str(text).strip().lower()
    if token == "original":
        return KernelSpec.original(epsilon)
    if token == "linear":
        return KernelSpec.inverse_linear(epsilon)
    if token == "square":
        return KernelSpec.inverse_square(epsilon)
    if token.startswith("power:"):
        try:
            exponent = float(token.split(":", 1)[1])
        except ValueError:
            raise ConfigError(
                f"bad power-law exponent in '{text}'; valid kernels: {KERNEL_CHOICES}"
            ) from None
        return KernelSpec.power_law(exponent, epsilon)
    raise ConfigError(f"unknown kernel '{text}'; valid kernels: {KERNEL_CHOICES}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravopt",
        description=(
            "Gravitational-search optimization with selectable pairwise force "
            "kernels, a force-law exponent probe, and a kernel comparison grid."
        ),
        epilog=(
            "Exit codes: 0 success, 2 usage error, 3 numeric divergence, "
            "4 I/O failure. Flags override --config values, which override "
            "the built-in defaults."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="{run,probe,compare,bench}")

    def add(p, *names, **kwargs):
        kwargs.setdefault("default", argparse.SUPPRESS)
        p.add_argument(*names, **kwargs)

    def add_common_numeric(p):
        add(p, "--g0", type=float, help="initial gravitational constant (default: 100.0)")
        add(p, "--alpha", type=float, help="decay rate of the G schedule (default: 20.0)")
        add(p, "--pop", type=int, help="population size (default: 50)")
        add(p, "--dims", type=int, help="search-space dimensionality (default: 30)")
        add(p, "--iters", type=int, help="iteration budget (default: 1000)")
        add(p, "--seed", type=int, help="64-bit unsigned RNG seed (default: 42)")

    def add_kernel(p):
        add(p, "--kernel", help=f"force kernel: {KERNEL_CHOICES} (default: original)")
        add(p, "--epsilon", type=float,
            help="softening constant in the force denominator (default: 1e-12)")

    def add_config(p):
        add(p, "--config", help="JSON config file mirroring the run configuration "
                                "(default: none)")

    p_run = sub.add_parser(
        "run", help="one optimization run, trace CSV to --trace or stdout"
    )
    add_kernel(p_run)
    add_common_numeric(p_run)
    add(p_run, "--function", help="objective: " + ", ".join(objective_names())
        + " (default: sphere)")
    add(p_run, "--deterministic", action="store_true",
        help="disable stochastic force/velocity weighting (default: off)")
    add(p_run, "--trace", help="trace CSV output path (default: stdout)")
    add_config(p_run)

    p_probe = sub.add_parser(
        "probe", help="fit the kernel's force-magnitude distance exponent"
    )
    add_kernel(p_probe)
    add(p_probe, "--g0", type=float,
        help="gravitational constant used for the probe (default: 100.0)")
    add(p_probe, "--out", help="probe CSV output path (default: stdout)")
    add_config(p_probe)

    p_compare = sub.add_parser(
        "compare",
        help="kernel comparison grid: {original, linear, square} on all "
             "objectives; writes results and summary CSVs",
    )
    add(p_compare, "--epsilon", type=float,
        help="softening constant for all compared kernels (default: 1e-12)")
    add_common_numeric(p_compare)
    add(p_compare, "--reps", type=int, help="repetitions per cell (default: 25)")
    add(p_compare, "--deterministic", action="store_true",
        help="disable stochastic force/velocity weighting (default: off)")
    add(p_compare, "--out",
        help="results CSV path; the summary CSV lands next to it with an "
             "'_summary' suffix (default: results.csv)")
    add(p_compare, "--no-timing", action="store_true", dest="no_timing",
        help="write 0 in wall_seconds for byte-reproducible output (default: off)")
    add(p_compare, "--jobs", type=int,
        help="worker processes for the grid; 0 = one per CPU (default: 0)")
    add_config(p_compare)

    p_bench = sub.add_parser(
        "bench", help="force-evaluation throughput, one line to stdout"
    )
    add_kernel(p_bench)
    add(p_bench, "--pop", type=int, help="population size (default: 50)")
    add(p_bench, "--dims", type=int, help="search-space dimensionality (default: 30)")
    add(p_bench, "--seed", type=int, help="64-bit unsigned RNG seed (default: 42)")
    add_config(p_bench)

    return parser


def parse_args(argv) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    unknown = set(data) - _CONFIG_FILE_KEYS
    if unknown:
        raise ConfigError(
            "unknown config keys: " + ", ".join(sorted(unknown))
            + "; valid keys: " + ", ".join(sorted(_CONFIG_FILE_KEYS))
        )
    return data


def _merged_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    settings["lower_bound"] = None
    settings["upper_bound"] = None
    settings["probe_r_values"] = None

    given = vars(args)
    if "config" in given:
        file_settings = _load_config_file(given["config"])
        kernel_value = file_settings.pop("kernel", None)
        if kernel_value is not None:
            if isinstance(kernel_value, dict):
                unknown = set(kernel_value) - {"kind", "exponent", "epsilon"}
                if unknown:
                    raise ConfigError(
                        "unknown kernel keys: " + ", ".join(sorted(unknown))
                    )
                kind = kernel_value.get("kind", "original")
                if kind == "power":
                    if "exponent" not in kernel_value:
                        raise ConfigError("power kernel needs an 'exponent'")
                    kind = f"power:{kernel_value['exponent']}"
                settings["kernel"] = kind
                if "epsilon" in kernel_value:
                    settings["epsilon"] = float(kernel_value["epsilon"])
            else:
                settings["kernel"] = str(kernel_value)
        settings.update(file_settings)

    for dest, key in _FLAG_TO_SETTING.items():
        if dest in given:
            settings[key] = given[dest]
    return settings


def _build_config(settings: dict) -> GsaConfig:
    kernel = parse_kernel(settings["kernel"], float(settings["epsilon"]))
    dims = int(settings["dims"])
    objective = make_objective(settings["function"], dims)
    lower = settings.get("lower_bound")
    upper = settings.get("upper_bound")
    lower = np.full(dims, objective.default_lower) if lower is None else np.asarray(lower, float)
    upper = np.full(dims, objective.default_upper) if upper is None else np.asarray(upper, float)
    config = GsaConfig(
        population=int(settings["population"]),
        dims=dims,
        lower_bound=lower,
        upper_bound=upper,
        kernel=kernel,
        g0=float(settings["g0"]),
        alpha=float(settings["alpha"]),
        max_iters=int(settings["max_iters"]),
        kbest_initial_fraction=float(settings["kbest_initial_fraction"]),
        deterministic_weights=bool(settings["deterministic_weights"]),
        seed=int(settings["seed"]),
        record_positions=bool(settings["record_positions"]),
    )
    validate_config(config)
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    settings = _merged_settings(args)
    config = _build_config(settings)
    objective = make_objective(settings["function"], config.dims)
    trace = run(config, objective.function)
    target = getattr(args, "trace", None)
    write_trace_csv(trace, config, target if target is not None else sys.stdout)
    return EXIT_OK


def _cmd_probe(args: argparse.Namespace) -> int:
    settings = _merged_settings(args)
    kernel = parse_kernel(settings["kernel"], float(settings["epsilon"]))
    grid = settings.get("probe_r_values")
    r_values = DEFAULT_PROBE_DISTANCES if grid is None else np.asarray(grid, float)
    report = probe_exponent(kernel, float(settings["g0"]), 1.0, 1.0, r_values)
    target = getattr(args, "out", None)
    write_probe_csv(report, target if target is not None else sys.stdout)
    return EXIT_OK


def _summary_path(results_path: str) -> Path:
    path = Path(results_path)
    return path.with_name(path.stem + "_summary" + (path.suffix or ".csv"))


def _cmd_compare(args: argparse.Namespace) -> int:
    settings = _merged_settings(args)
    epsilon = float(settings["epsilon"])
    kernels = (
        KernelSpec.original(epsilon),
        KernelSpec.inverse_linear(epsilon),
        KernelSpec.inverse_square(epsilon),
    )
    dims = int(settings["dims"])
    objectives = tuple(make_objective(name, dims) for name in objective_names())
    base = _build_config(settings)
    plan = ExperimentPlan(
        base_config=base,
        kernels=kernels,
        objectives=objectives,
        repetitions=int(settings["repetitions"]),
        base_seed=int(settings["seed"]),
    )
    jobs = int(getattr(args, "jobs", 0))
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    rows = run_grid(plan, jobs=jobs)
    summary = summarize(rows)

    out_path = getattr(args, "out", "results.csv")
    summary_path = _summary_path(out_path)
    write_results_csv(rows, out_path, include_timing=not getattr(args, "no_timing", False))
    write_summary_csv(summary, summary_path)

    kernel_names = [kernel.name for kernel in kernels]
    print(
        f"compare: kernels={','.join(kernel_names)}"
        f" objectives={','.join(spec.name for spec in objectives)}"
        f" reps={plan.repetitions} population={base.population} dims={dims}"
        f" iters={base.max_iters} epsilon={format_float(epsilon)}"
        f" base_seed={plan.base_seed}"
    )
    print("median final best per (objective, kernel):")
    medians = {(row.kernel, row.objective): row.median for row in summary.rows}
    for spec in objectives:
        parts = " ".join(
            f"{name}={format_float(medians[(name, spec.name)])}"
            for name in kernel_names
        )
        print(f"  {spec.name}: {parts}")
    print("win counts (strictly lower final best wins):")
    for wc in summary.win_counts:
        print(
            f"  {wc.objective}: {wc.kernel_a} vs {wc.kernel_b} -> "
            f"{wc.wins_a}/{wc.wins_b} ({wc.ties} ties)"
        )
    print(f"wrote {out_path} and {summary_path}")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    settings = _merged_settings(args)
    kernel = parse_kernel(settings["kernel"], float(settings["epsilon"]))
    n = int(settings["population"])
    dims = int(settings["dims"])
    rng = make_rng(int(settings["seed"]))
    positions = rng.uniform(-100.0, 100.0, (n, dims))
    masses = rng.random(n)
    masses /= masses.sum()
    kbest = np.arange(n)
    weights = np.ones((n, n))
    _batch_forces(positions, masses, 100.0, kernel, kbest, weights)  # warm-up
    evaluations = 0
    started = time.perf_counter()
    while True:
        _batch_forces(positions, masses, 100.0, kernel, kbest, weights)
        evaluations += 1
        elapsed = time.perf_counter() - started
        if elapsed >= 0.2:
            break
    pairs_per_second = evaluations * n * (n - 1) / elapsed
    print(f"kernel={kernel.name} pairs_per_second={pairs_per_second:.6g}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "probe": _cmd_probe,
    "compare": _cmd_compare,
    "bench": _cmd_bench,
}


def execute(args: argparse.Namespace) -> int:
    """Dispatch a parsed invocation, mapping failures to exit codes."""
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"gravopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ForceOverflowError, DivergenceError, EvaluationError) as exc:
        print(f"gravopt: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gravopt: i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(args)


def console_main() -> None:
    sys.exit(main())
