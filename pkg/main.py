import argparse
import asyncio
import logging
import sys

from utils.command_registry import config_flags, register_commands
from utils.decorators import EXIT_CONFIG_ERROR
from utils.experiment_config import ConfigError, parse_config
from utils.logger import setup_logging, tag_experiment

EXIT_INTERRUPTED = 130
EXIT_CRASHED = 1


# Uncaught exceptions outside the event loop still land in the run log
def log_uncaught(exc_type, exc_value, exc_traceback):
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    logging.getLogger(__name__).critical("Experiment run crashed", exc_info=(exc_type, exc_value, exc_traceback))

sys.excepthook = log_uncaught


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langevin",
        description="Kinetic Langevin solver experiments: convergence orders and lower-bound constructions.",
    )
    return register_commands(parser)


async def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tag_experiment(args.experiment)
    logger = logging.getLogger(__name__)
    try:
        config = parse_config(args.experiment, config_flags(args), args.config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    logger.debug(f"Dispatching {args.experiment} with seed {config.seed} on {config.workers} worker(s)")
    return await args.handler(config)


if __name__ == '__main__':
    setup_logging()
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        logging.getLogger(__name__).warning("Run interrupted")
        sys.exit(EXIT_INTERRUPTED)
    except Exception as e:
        logging.getLogger(__name__).critical(f"Experiment run crashed: {e}", exc_info=True)
        sys.exit(EXIT_CRASHED)
