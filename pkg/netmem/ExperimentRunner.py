"""
Experiment driver and CLI.

Sweeps the number of memories M = round(N^x) over connected G(N, p) samples,
estimates the coding gain g(n, m, ε) over a grid, and emits theory curves,
all as plot-ready CSV or JSON tables.

Usage:
    python -m netmem.ExperimentRunner net-sweep --nodes 512,2048,8192 --exponents 0.4,0.8,1.0 --out sweep.csv
    python -m netmem.ExperimentRunner code-gain --seq-len 512,4096 --mem-len 0,65536
    python -m netmem.ExperimentRunner theory --nodes 8192 --gain 1.25
    python -m netmem.ExperimentRunner single --nodes 512 --exponents 0.9
"""

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
import yaml

from .coding import estimate_g
from .config.schemas import validate_config
from .deployment import EvaluationContext, coverage_fraction, deploy_uniform, effective_distances, total_flow
from .exceptions import ConfigurationError, FileIOError, NetMemError
from .logging_config import LoggerManager
from .random_graph import RandomGraphSpec, generate_er
from .seeding import mix_seed
from .theory import below_threshold_gain_bound, theory_gain, theory_gain_at_exponent

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / 'config' / 'config.yml'
SOURCE_VERTEX = 0
MEMORY_SALT = 0xD3
FLOAT_FORMAT = "%.6g"
BELOW_THRESHOLD_NOTE = "below-threshold, G~1"

TRIAL_COLUMNS = ["N", "c", "g", "exponent", "M", "trial", "F0", "F", "G"]
AGGREGATE_COLUMNS = ["N", "c", "g", "exponent", "M", "trials", "mean_G", "std_G", "theory_G", "above_threshold"]
CODING_COLUMNS = ["n", "m", "epsilon", "K", "T", "g_hat", "mean_Q", "ci"]
THEORY_COLUMNS = ["exponent", "M", "theory_G", "above_threshold", "below_bound", "note"]
DESTINATION_COLUMNS = ["dest", "dist", "eff_dist", "chosen_memory", "in_D1"]

# Flat config keys that differ from ExperimentConfig field names
_KEY_MAP = {
    "seed": "master_seed",
    "format": "output_format",
    "out": "output_path",
    "seq_len": "seq_lens",
    "mem_len": "mem_lens",
}


@dataclass
class ExperimentConfig:
    """
    Settings for every experiment the runner knows.

    Attributes:
        nodes: Network sizes N; one sweep curve per size
        degree_coeff: c in p = c·ln N / N
        gain: Memorization gain g
        exponents: Swept x values, M = round(N^x)
        trials: Trials per exponent
        master_seed: Root of all derived seeds
        output_format: 'csv' or 'json'
        output_path: Output file, or None for stdout
        alphabet, seq_lens, mem_lens, epsilon, sources, draws, memory_mode:
            Coding experiment grid and estimator settings
        workers: Process count for trials and sources
    """

    nodes: Tuple[int, ...] = (512, 2048, 8192)
    degree_coeff: float = 2.0
    gain: float = 1.25
    exponents: Tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 1.0)
    trials: int = 20
    master_seed: int = 42
    output_format: str = "csv"
    output_path: Optional[str] = None
    alphabet: int = 4
    seq_lens: Tuple[int, ...] = (256, 1024, 4096)
    mem_lens: Tuple[int, ...] = (0, 1024, 65536)
    epsilon: float = 0.05
    sources: int = 200
    draws: int = 50
    memory_mode: str = "fresh"
    workers: int = 1

    def __post_init__(self):
        """Validate configuration after initialization."""
        if isinstance(self.nodes, int):
            self.nodes = (self.nodes,)
        self.nodes = tuple(int(n) for n in self.nodes)
        self.exponents = tuple(float(x) for x in self.exponents)
        self.seq_lens = tuple(int(n) for n in self.seq_lens)
        self.mem_lens = tuple(int(m) for m in self.mem_lens)
        if not self.nodes or min(self.nodes) < 2:
            raise ConfigurationError("nodes must be a nonempty list of sizes >= 2")
        if not self.degree_coeff > 1:
            raise ConfigurationError("degree_coeff must be > 1")
        if not self.gain > 1:
            raise ConfigurationError("gain must be > 1")
        if not self.exponents or any(not 0 <= x <= 1 for x in self.exponents):
            raise ConfigurationError("exponents must be a nonempty list in [0, 1]")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not 0 <= self.master_seed < 1 << 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.output_format not in ("csv", "json"):
            raise ConfigurationError(f"format must be csv or json, got {self.output_format!r}")
        if self.alphabet < 2:
            raise ConfigurationError("alphabet must be >= 2")
        if not self.seq_lens or min(self.seq_lens) < 1:
            raise ConfigurationError("seq_len values must be >= 1")
        if not self.mem_lens or min(self.mem_lens) < 0:
            raise ConfigurationError("mem_len values must be >= 0")
        if not 0 < self.epsilon < 1:
            raise ConfigurationError("epsilon must lie in (0, 1)")
        if self.sources < 20:
            raise ConfigurationError("sources must be >= 20")
        if self.draws < 1:
            raise ConfigurationError("draws must be >= 1")
        if self.memory_mode not in ("fresh", "fixed"):
            raise ConfigurationError("memory_mode must be fresh or fixed")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")

    @property
    def largest_nodes(self) -> int:
        """The N used by the theory curve and single-deployment runs."""
        return max(self.nodes)

    @classmethod
    def from_mapping(cls, mapping: Dict[str, Any]) -> 'ExperimentConfig':
        """Build from flat config keys (``seed``, ``format``, ``out``, ``seq_len``...)."""
        kwargs = {_KEY_MAP.get(key, key): value for key, value in mapping.items() if value is not None}
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigurationError(f"Unknown configuration key: {e}") from e


@dataclass(frozen=True)
class SweepRow:
    """One trial of the network sweep."""

    N: int
    c: float
    g: float
    exponent: float
    M: int
    trial: int
    F0: float
    F: float
    G: float


@dataclass(frozen=True)
class AggregateRow:
    """Per-exponent summary of a sweep."""

    N: int
    c: float
    g: float
    exponent: float
    M: int
    trials: int
    mean_G: float
    std_G: float
    theory_G: float
    above_threshold: bool


@dataclass
class SweepResult:
    trials: List[SweepRow] = field(default_factory=list)
    aggregates: List[AggregateRow] = field(default_factory=list)


def load_config(yaml_file: Union[Path, str]) -> Dict[str, Any]:
    """Load and validate a flat YAML config file.

    Raises:
        FileIOError: If file cannot be read.
        ConfigurationError: If YAML parsing fails or config is invalid.
    """
    try:
        with open(yaml_file, 'r') as file:
            config = yaml.safe_load(file) or {}
    except (IOError, OSError) as e:
        raise FileIOError(f"Failed to read config file '{yaml_file}': {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Failed to parse YAML config file '{yaml_file}': {e}") from e

    if not isinstance(config, dict):
        raise ConfigurationError(f"Config file '{yaml_file}' must hold a mapping")
    try:
        validate_config(config)
    except ValueError as e:
        raise ConfigurationError(f"Configuration validation failed: {e}") from e
    return config


def memories_for_exponent(num_vertices: int, exponent: float) -> int:
    """M = round(N^x), at least 1 and at most N-1."""
    raw = int(math.floor(num_vertices ** exponent + 0.5))
    return min(num_vertices - 1, max(1, raw))


def run_trial(task: Tuple[int, float, float, float, int, int, int]) -> SweepRow:
    """
    Sample one graph and deployment and measure its flows.

    The trial seed is keyed by (N, exponent index, trial index), so rows at one
    N do not depend on which other sizes are swept alongside it.
    """
    nodes, c, g, exponent, exponent_index, trial, master_seed = task
    seed = mix_seed(master_seed, nodes, exponent_index, trial)
    graph = generate_er(RandomGraphSpec(nodes, c, seed))
    num_memories = memories_for_exponent(nodes, exponent)
    dep = deploy_uniform(graph, SOURCE_VERTEX, num_memories, g, mix_seed(seed, MEMORY_SALT))
    summary = total_flow(dep)
    return SweepRow(nodes, c, g, exponent, num_memories, trial, summary.flow_no_mem,
                    summary.flow_with_mem, summary.net_gain)


def aggregate(rows: Sequence[SweepRow]) -> AggregateRow:
    """Mean and sample standard deviation of G for one exponent (std 0 for one trial)."""
    first = rows[0]
    gains = pd.Series([row.G for row in rows], dtype=float)
    std = float(gains.std(ddof=1)) if len(rows) > 1 else 0.0
    theory = theory_gain(first.N, first.M, first.g)
    return AggregateRow(first.N, first.c, first.g, first.exponent, first.M, len(rows),
                        float(gains.mean()), std, theory.value, theory.above_threshold)


def to_frame(rows: Sequence[Any], columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=columns)


def _json_value(value: Any) -> Any:
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float):
        return float(FLOAT_FORMAT % value) if math.isfinite(value) else None
    return value


def format_table(frame: pd.DataFrame, output_format: str = "csv") -> str:
    """Render rows as CSV (6 significant digits, LF) or a JSON array of objects."""
    if output_format == "json":
        records = [{key: _json_value(value) for key, value in record.items()}
                   for record in frame.to_dict(orient="records")]
        return json.dumps(records, indent=2) + "\n"
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_table(frame: pd.DataFrame, path: Optional[Union[Path, str]], output_format: str = "csv") -> None:
    """Write a table to ``path`` or to stdout when ``path`` is None.

    Raises:
        FileIOError: If writing to file fails.
    """
    text = format_table(frame, output_format)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, 'w', newline='') as handle:
            handle.write(text)
    except (IOError, OSError) as e:
        raise FileIOError(f"Failed to write output file '{path}': {e}") from e
    logger.info(f"Wrote {len(frame)} rows to {path}")


def aggregate_path(path: Union[Path, str]) -> Path:
    """Sibling file for aggregate rows: sweep.csv -> sweep_aggregate.csv."""
    path = Path(path)
    return path.with_name(f"{path.stem}_aggregate{path.suffix}")


class ExperimentRunner:
    """Run sweeps and coding experiments for one ExperimentConfig."""

    def __init__(self, config: Optional[ExperimentConfig] = None) -> None:
        self.config = config or ExperimentConfig()
        self.logger = logging.getLogger(__name__)

    def _map(self, func, tasks: List[Any]) -> List[Any]:
        # Results come back in task order whatever the worker count.
        if self.config.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(func, tasks))
        return [func(task) for task in tasks]

    def run_network_sweep(self) -> SweepResult:
        """
        Per-trial flows and per-(N, exponent) aggregates.

        Rows are ordered by N, then exponent, then trial, giving one curve of
        G versus log_N(M) per network size.
        """
        cfg = self.config
        points = [(n, i, x) for n in cfg.nodes for i, x in enumerate(cfg.exponents)]
        tasks = [
            (n, cfg.degree_coeff, cfg.gain, x, i, t, cfg.master_seed)
            for n, i, x in points
            for t in range(cfg.trials)
        ]
        self.logger.info(
            f"Sweeping N={list(cfg.nodes)}, c={cfg.degree_coeff}, g={cfg.gain}: "
            f"{len(cfg.exponents)} exponents x {cfg.trials} trials per size"
        )
        rows = self._map(run_trial, tasks)
        result = SweepResult(trials=rows)
        for k, (n, _, x) in enumerate(points):
            agg = aggregate(rows[k * cfg.trials:(k + 1) * cfg.trials])
            result.aggregates.append(agg)
            self.logger.info(f"N={n} x={x:g} M={agg.M}: mean G {agg.mean_G:.6g} (theory {agg.theory_G:.6g})")
        return result

    def run_coding_experiment(self) -> pd.DataFrame:
        """One row per (n, m) grid point with g_hat, mean Q and its 95% half width."""
        cfg = self.config
        rows = []
        for n in cfg.seq_lens:
            for m in cfg.mem_lens:
                self.logger.info(f"Estimating g(n={n}, m={m}, eps={cfg.epsilon})")
                estimate = estimate_g(n, m, cfg.epsilon, cfg.sources, cfg.draws, cfg.alphabet,
                                      mix_seed(cfg.master_seed, n, m), cfg.memory_mode, cfg.workers)
                rows.append({
                    "n": n, "m": m, "epsilon": cfg.epsilon, "K": cfg.sources, "T": cfg.draws,
                    "g_hat": estimate.g_hat, "mean_Q": estimate.mean_q, "ci": estimate.ci_half_width,
                })
        return pd.DataFrame(rows, columns=CODING_COLUMNS)

    def emit_theory_curve(self) -> pd.DataFrame:
        cfg = self.config
        return emit_theory_curve(cfg.largest_nodes, cfg.gain, cfg.exponents)

    def run_single(self) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """Summary and per-destination tables for one deployment at the largest N and first exponent."""
        cfg = self.config
        nodes = cfg.largest_nodes
        seed = mix_seed(cfg.master_seed, nodes, 0, 0)
        graph = generate_er(RandomGraphSpec(nodes, cfg.degree_coeff, seed))
        num_memories = memories_for_exponent(nodes, cfg.exponents[0])
        dep = deploy_uniform(graph, SOURCE_VERTEX, num_memories, cfg.gain, mix_seed(seed, MEMORY_SALT))
        ctx = EvaluationContext(dep)
        summary = total_flow(dep, ctx)
        fields = effective_distances(dep, ctx)
        summary_frame = pd.DataFrame([{
            "N": nodes, "M": num_memories, "g": cfg.gain,
            "F0": summary.flow_no_mem, "F": summary.flow_with_mem, "G": summary.net_gain,
            "benefiting": summary.num_benefiting, "destinations": summary.num_destinations,
            "coverage": coverage_fraction(dep, ctx),
        }])
        destinations = pd.DataFrame(
            [
                {
                    "dest": v, "dist": fields.direct_dist[v], "eff_dist": fields.eff_dist[v],
                    "chosen_memory": -1 if fields.chosen_memory[v] is None else fields.chosen_memory[v],
                    "in_D1": fields.in_d1[v],
                }
                for v in dep.destinations()
            ],
            columns=DESTINATION_COLUMNS,
        )
        return summary_frame, destinations


def emit_theory_curve(num_vertices: int, g: float, exponents: Sequence[float]) -> pd.DataFrame:
    """
    Theory gain per exponent; below x = 1/g the gain is reported as 1 with a note.
    """
    rows = []
    for x in exponents:
        num_memories = memories_for_exponent(num_vertices, x)
        above = x >= 1.0 / g
        rows.append({
            "exponent": x,
            "M": num_memories,
            "theory_G": theory_gain_at_exponent(x, g) if above else 1.0,
            "above_threshold": above,
            "below_bound": below_threshold_gain_bound(num_vertices, num_memories, g),
            "note": "" if above else BELOW_THRESHOLD_NOTE,
        })
    return pd.DataFrame(rows, columns=THEORY_COLUMNS)


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from e


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from e


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Path to YAML config (defaults to netmem/config/config.yml)")
    common.add_argument("--nodes", type=_int_list, default=None, help="Comma list of network sizes N")
    common.add_argument("--degree-coeff", type=float, default=None, help="c in p = c*ln(N)/N")
    common.add_argument("--gain", type=float, default=None, help="Memorization gain g")
    common.add_argument("--exponents", type=_float_list, default=None, help="Comma list of x, M = round(N^x)")
    common.add_argument("--trials", type=int, default=None, help="Trials per exponent")
    common.add_argument("--seed", type=int, default=None, help="Master seed")
    common.add_argument("--alphabet", type=int, default=None, help="Alphabet size A")
    common.add_argument("--seq-len", type=_int_list, default=None, help="Comma list of sequence lengths n")
    common.add_argument("--mem-len", type=_int_list, default=None, help="Comma list of memory lengths m")
    common.add_argument("--epsilon", type=float, default=None, help="Quantile level for g(n,m,eps)")
    common.add_argument("--sources", type=int, default=None, help="Sources K per grid point")
    common.add_argument("--draws", type=int, default=None, help="Sequence draws T per source")
    common.add_argument("--memory-mode", choices=["fresh", "fixed"], default=None, help="Memorized sequence per draw or per source")
    common.add_argument("--workers", type=int, default=None, help="Worker processes")
    common.add_argument("--out", type=str, default=None, help="Output file (stdout when omitted)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="Output format")
    common.add_argument("--log-level", default="INFO", help="Logging level for the diagnostic stream")
    common.add_argument("--log-dir", type=str, default=None, help="Also write logs under <log-dir>/logs/<command>/")

    parser = argparse.ArgumentParser(description="Network-wide gain of memory-assisted source coding.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("net-sweep", parents=[common], help="Monte Carlo sweep of G versus log_N(M)")
    sub.add_parser("code-gain", parents=[common], help="Estimate g(n, m, eps) over a grid")
    sub.add_parser("theory", parents=[common], help="Theory gain curve versus log_N(M)")
    sub.add_parser("single", parents=[common], help="Evaluate one deployment")
    return parser.parse_args(argv)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults file, then --config file, then explicit flags."""
    mapping = load_config(DEFAULT_CONFIG_PATH)
    if args.config:
        mapping.update(load_config(args.config))
    overrides = {
        "nodes": args.nodes, "degree_coeff": args.degree_coeff, "gain": args.gain,
        "exponents": args.exponents, "trials": args.trials, "seed": args.seed,
        "alphabet": args.alphabet, "seq_len": args.seq_len, "mem_len": args.mem_len,
        "epsilon": args.epsilon, "sources": args.sources, "draws": args.draws,
        "memory_mode": args.memory_mode, "workers": args.workers,
        "out": args.out, "format": args.format,
    }
    mapping.update({key: value for key, value in overrides.items() if value is not None})
    return ExperimentConfig.from_mapping(mapping)


def _setup_logging(args: argparse.Namespace, seed: int) -> logging.Logger:
    """Run logger named after the subcommand, e.g. ``netmem.net-sweep``."""
    level = getattr(logging, str(args.log_level).upper(), logging.INFO)
    if args.log_dir:
        manager = LoggerManager(base_dir=Path(args.log_dir), experiment_name=args.command, seed=seed)
        return manager.create_logger(level)
    return LoggerManager.create_console_logger(args.command, level, seed)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    try:
        config = resolve_config(args)
        run_logger = _setup_logging(args, config.master_seed)
        run_logger.info(f"Starting {args.command} with seed {config.master_seed}")
        runner = ExperimentRunner(config)
        fmt = config.output_format
        out = config.output_path

        if args.command == "net-sweep":
            result = runner.run_network_sweep()
            aggregates = to_frame(result.aggregates, AGGREGATE_COLUMNS)
            if out:
                write_table(to_frame(result.trials, TRIAL_COLUMNS), out, fmt)
                write_table(aggregates, aggregate_path(out), fmt)
            else:
                write_table(aggregates, None, fmt)
        elif args.command == "code-gain":
            write_table(runner.run_coding_experiment(), out, fmt)
        elif args.command == "theory":
            write_table(runner.emit_theory_curve(), out, fmt)
        elif args.command == "single":
            summary, destinations = runner.run_single()
            if fmt == "json":
                text = json.dumps({
                    "summary": json.loads(format_table(summary, "json"))[0],
                    "destinations": json.loads(format_table(destinations, "json")),
                }, indent=2) + "\n"
            else:
                text = format_table(summary) + "\n" + format_table(destinations)
            if out:
                try:
                    Path(out).write_text(text)
                except OSError as e:
                    raise FileIOError(f"Failed to write output file '{out}': {e}") from e
            else:
                sys.stdout.write(text)
        run_logger.info(f"Finished {args.command}")
    except NetMemError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
