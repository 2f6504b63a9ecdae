"""Entry point script to run the default theory, network sweep and coding experiments."""

from pathlib import Path
import sys

# Add project root to Python path
project_root = Path(__file__).resolve().parent
sys.path.append(str(project_root))

from netmem.ExperimentRunner import (
    AGGREGATE_COLUMNS,
    TRIAL_COLUMNS,
    DEFAULT_CONFIG_PATH,
    ExperimentConfig,
    ExperimentRunner,
    load_config,
    to_frame,
    write_table,
)
from netmem.exceptions import NetMemError
from netmem.logging_config import LoggerManager


def main() -> None:
    """Emit the theory curve, sweep G over log_N(M), and estimate g(n, m, eps) into output/."""

    config = ExperimentConfig.from_mapping(load_config(DEFAULT_CONFIG_PATH))
    runner = ExperimentRunner(config)

    output_dir = project_root / 'output'
    output_dir.mkdir(parents=True, exist_ok=True)

    logger_manager = LoggerManager(experiment_name="default_pipeline", seed=config.master_seed)
    logger = logger_manager.create_logger()

    logger.info(f"N={list(config.nodes)}, c={config.degree_coeff}, g={config.gain}, seed={config.master_seed}")

    try:
        write_table(runner.emit_theory_curve(), output_dir / 'theory.csv')

        sweep = runner.run_network_sweep()
        write_table(to_frame(sweep.trials, TRIAL_COLUMNS), output_dir / 'sweep.csv')
        write_table(to_frame(sweep.aggregates, AGGREGATE_COLUMNS), output_dir / 'sweep_aggregate.csv')

        for row in sweep.aggregates:
            if row.above_threshold:
                logger.info(f"N={row.N} x={row.exponent:g}: mean G {row.mean_G:.4f} vs theory {row.theory_G:.4f}")
            else:
                logger.info(f"N={row.N} x={row.exponent:g}: mean G {row.mean_G:.4f} (below threshold)")

        write_table(runner.run_coding_experiment(), output_dir / 'coding_gain.csv')
    except NetMemError as e:
        logger.error(f"Pipeline failed: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
