"""Command-line entry point."""
from typing import List, Optional
import argparse
import json
import logging
import sys
import traceback

from constants import EXIT_CONFIG_ERROR, EXIT_DATA_ERROR, EXIT_NUMERIC_ABORT, TRANSFORM_PRESETS
from errors import CheckpointError, ConfigError, DataFormatError, NumericAbortError
from handlers import HANDLERS
from run_config import load_run_config

logger = logging.getLogger(__name__)


def _int_list(text: str) -> str:
    values = [part.strip() for part in text.split(',') if part.strip()]
    if not values or not all(v.isdigit() for v in values):
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")
    return ','.join(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='equiinv', description=__doc__)
    parser.add_argument('--config', help='key=value configuration file')
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='override one configuration key (repeatable)')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--output-dir')
    parser.add_argument('--verbose', action='store_true')
    commands = parser.add_subparsers(dest='command', required=True)

    dump = commands.add_parser('dump-transforms', help='list the transforms of a preset')
    dump.add_argument('--preset', choices=TRANSFORM_PRESETS)
    dump.add_argument('--out')

    commands.add_parser('prepare-data', help='load the dataset and write the split summary')

    train = commands.add_parser('train', help='train generation 0 and the distilled generations')
    train.add_argument('--resume', help='checkpoint to continue from')
    train.add_argument('--eval-each-generation', action='store_true')

    evaluation = commands.add_parser('eval', help='few-shot evaluation of a checkpoint')
    evaluation.add_argument('checkpoint')
    evaluation.add_argument('--shots', type=_int_list)
    evaluation.add_argument('--n-way', type=int)
    evaluation.add_argument('--num-tasks', type=int)

    commands.add_parser('ablate', help='compare the single-objective variants over seeds')

    sweep = commands.add_parser('sweep', help='train and evaluate once per value of a config key')
    sweep.add_argument('--key', required=True)
    sweep.add_argument('values', nargs='+')

    embed = commands.add_parser('embed', help='export test-split embeddings and their PCA projection')
    embed.add_argument('checkpoint')
    embed.add_argument('--out', required=True)
    embed.add_argument('--max-images', type=int, default=1000)
    return parser


def _flags(args: argparse.Namespace) -> dict:
    flags = {
        'seed': args.seed,
        'output_dir': args.output_dir,
        'shots': getattr(args, 'shots', None),
        'n_way': getattr(args, 'n_way', None),
        'num_tasks': getattr(args, 'num_tasks', None),
    }
    return {key: str(value) for key, value in flags.items() if value is not None}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        config = load_run_config(args.config, args.overrides, _flags(args))
        handler = HANDLERS[args.command]
        logger.info("Executing handler for command: %s", args.command)
        result = handler(vars(args), config)
        logger.debug("Handler result: %s", json.dumps(result['body'], default=str))
        return result['exit_code']

    except ConfigError as e:
        logger.error("Config error: %s", e)
        return EXIT_CONFIG_ERROR
    except (DataFormatError, CheckpointError, OSError) as e:
        logger.error("Data error: %s", e)
        return EXIT_DATA_ERROR
    except NumericAbortError as e:
        logger.error("Numeric abort: %s (state dumped to %s)", e, e.dump_path)
        return EXIT_NUMERIC_ABORT
    except ValueError as e:
        logger.error("ValueError: %s", e)
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.error("Error type: %s", type(e))
        logger.error("Traceback: %s", traceback.format_exc())
        return 1


if __name__ == '__main__':
    sys.exit(main())
