import logging
import time
from functools import wraps

from .artifacts import build_summary, write_csv, write_json
from .experiment_config import ConfigError, ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


def experiment_handler(func):
    """Decorator turning an experiment coroutine into a command: time it, write artifacts, map to an exit status."""
    @wraps(func)
    async def wrapper(config: ExperimentConfig) -> int:
        started = time.perf_counter()
        logger.info(f"Starting {config.experiment} (seed={config.seed}, workers={config.workers})")
        try:
            outcome = await func(config)
        except ConfigError as e:
            logger.error(f"Configuration error: {e}")
            return EXIT_CONFIG_ERROR
        except ValueError as e:
            # library preconditions reject the parameters the config supplied
            logger.error(f"Invalid parameters for {config.experiment}: {e}")
            return EXIT_CONFIG_ERROR

        runtime = time.perf_counter() - started
        summary = build_summary(config.experiment, config.params(), outcome, runtime)
        try:
            await write_csv(config.csv_path, outcome.rows, config.experiment, config.seed)
            await write_json(config.json_path, summary)
        except OSError as e:
            logger.error(f"Cannot write outputs: {e}")
            return EXIT_CONFIG_ERROR

        failed = [check["name"] for check in outcome.checks if not check["pass"]]
        if failed:
            logger.warning(f"{config.experiment} finished in {runtime:.1f}s with failed checks: {', '.join(failed)}")
            return EXIT_CHECK_FAILED
        logger.info(f"{config.experiment} finished in {runtime:.1f}s, all checks passed")
        return EXIT_OK

    return wrapper


def require_solver(*solvers: str):
    """Decorator rejecting configs whose solver is not one of solvers."""
    def decorator(func):
        @wraps(func)
        async def wrapper(config: ExperimentConfig):
            if config.solver not in solvers:
                raise ConfigError(f"'{config.experiment}' needs solver in {{{', '.join(solvers)}}}, got '{config.solver}'")
            return await func(config)
        return wrapper
    return decorator
