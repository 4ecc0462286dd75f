"""Main script to design, evaluate and simulate authentication mechanisms from credential fault probabilities."""

import argparse
import sys

from src.baselines import CATALOG_LIMIT, best_symmetric, dominance_relation, exhaustive_search
from src.casestudy_generator import FAMILIES, CaseStudyConfig, CaseStudyGenerator
from src.credential_model import count_scenarios, enumerate_viable
from src.data.path_manager import resolve_model_path
from src.errors import DimensionMismatchError, MechanismDesignError, SimulationBoundsError
from src.execution_simulator import DEFAULT_HORIZON, MAX_SWEEP_CREDENTIALS, success_equivalence_sweep
from src.mechanism import PROFILE_LIMIT, summarize, threshold_table
from src.scenario_search import SearchParams, certify, default_delta, scenario_based_search
from src.services.logging_config import set_log_level, setup_logger
from src.services.mechanism_io import read_mechanism, write_mechanism
from src.services.model_reader import read_fault_model
from src.services.report_writer import REPORT_FORMATS, mechanism_report, render_report, write_scenarios_csv

# Initialize logger using the setup function
logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NOT_CERTIFIED = 3


def _delta(value):
    try:
        delta = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"delta must be a number, got {value!r}") from None
    if not 0.0 < delta < 1.0:
        raise argparse.ArgumentTypeError(f"delta must lie in (0, 1), got {delta}")
    return delta


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if number <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def _non_negative_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {number}")
    return number


def _positive_float(value):
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}") from None
    if number <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {number}")
    return number


class MechanismDesignerApp:
    """
    Command-line application for the mechanism designer.

    Every sub-command has a run_* method that prints its report to stdout and returns an exit code:
    0 on success, 2 for invalid input, 3 when a search stopped at its node or time limit
    and 4 when a size guard rejects the request.
    """

    def __init__(self):
        self.parser = self._create_parser()

    def _create_parser(self):
        parser = argparse.ArgumentParser(
            prog='run_app.py',
            description='Design delta-optimal authentication mechanisms from credential fault probabilities.',
        )
        verbosity = parser.add_mutually_exclusive_group()
        verbosity.add_argument('--verbose', action='store_true', help='Log debug messages')
        verbosity.add_argument('--quiet', action='store_true', help='Log warnings and errors only')

        subparsers = parser.add_subparsers(dest='command', required=True)

        search_parser = subparsers.add_parser('search', help='Find a delta-optimal mechanism')
        search_parser.add_argument('model', help='Fault-model CSV file or bundled model name')
        search_parser.add_argument('--delta', type=_delta, help='Pruning margin, default 1e-5 (n <= 9) or 1e-6')
        search_parser.add_argument('--node-limit', type=_positive_int, help='Stop after this many search nodes')
        search_parser.add_argument('--time-limit', type=_positive_float, help='Stop after this many seconds')
        search_parser.add_argument('--mechanism-out', help='Also write the mechanism to this file')
        search_parser.add_argument('--format', choices=REPORT_FORMATS, default='text')

        exhaustive_parser = subparsers.add_parser('exhaustive', help='Best mechanism over all monotone functions')
        exhaustive_parser.add_argument('model', help='Fault-model CSV file or bundled model name')
        exhaustive_parser.add_argument('--format', choices=REPORT_FORMATS, default='text')

        scenarios_parser = subparsers.add_parser('scenarios', help='List viable scenarios by probability')
        scenarios_parser.add_argument('model', help='Fault-model CSV file or bundled model name')
        scenarios_parser.add_argument('--top-k', type=_non_negative_int, help='Only list the first k scenarios')
        scenarios_parser.add_argument(
            '--include-zero', action='store_true', help='Also list viable scenarios with probability 0'
        )

        casestudy_parser = subparsers.add_parser('casestudy', help='Sweep a case-study family over credential counts')
        casestudy_parser.add_argument('--family', choices=FAMILIES, required=True)
        casestudy_parser.add_argument('--n-min', type=_positive_int, default=1)
        casestudy_parser.add_argument('--n-max', type=_positive_int, default=4)
        casestudy_parser.add_argument('--weak', type=_non_negative_int, default=0, help='Weak credentials per point')
        casestudy_parser.add_argument('--delta', type=_delta)
        casestudy_parser.add_argument('--out', help='Results CSV path, default a time-stamped file')
        casestudy_parser.add_argument(
            '--workers', type=_non_negative_int, default=1, help='Worker processes, 0 for one per physical core'
        )
        casestudy_parser.add_argument('--budget-seconds', type=_positive_float, help='Wall-clock budget of the sweep')

        simulate_parser = subparsers.add_parser(
            'simulate', help='Check execution semantics against f(user) and f(attacker)'
        )
        simulate_parser.add_argument('--n', type=_positive_int, required=True)
        simulate_parser.add_argument('--horizon', type=_positive_int, default=DEFAULT_HORIZON)
        simulate_parser.add_argument('--format', choices=REPORT_FORMATS, default='text')

        evaluate_parser = subparsers.add_parser('evaluate', help='Evaluate a mechanism file on a fault model')
        evaluate_parser.add_argument('model', help='Fault-model CSV file or bundled model name')
        evaluate_parser.add_argument('mechanism', help='Mechanism file: n=<count> then minimal true vectors')
        evaluate_parser.add_argument('--format', choices=REPORT_FORMATS, default='text')

        return parser

    @staticmethod
    def _load_model(model_argument):
        return read_fault_model(resolve_model_path(model_argument))

    def run_search(self, args):
        model = self._load_model(args.model)
        delta = args.delta if args.delta is not None else default_delta(model.n)
        params = SearchParams(delta=delta, node_limit=args.node_limit, time_limit=args.time_limit)
        result = scenario_based_search(model, params)

        if not certify(result, model):
            logger.critical("The search result failed re-evaluation")
            return EXIT_FAILED

        summary = summarize(result.best_table, model, enumerate_viable(model))
        report = mechanism_report(
            summary,
            delta=delta,
            delta_certified=result.delta_certified,
            stats=result.stats.as_dict(),
        )
        print(render_report(report, args.format), end='')

        if args.mechanism_out:
            write_mechanism(result.best_table, args.mechanism_out)
            logger.info(f"Mechanism saved to {args.mechanism_out}")

        if not result.delta_certified:
            logger.warning("Search stopped at its limit; the mechanism is not delta-certified")
            return EXIT_NOT_CERTIFIED
        return EXIT_OK

    def run_exhaustive(self, args):
        model = self._load_model(args.model)
        table, _ = exhaustive_search(model)
        summary = summarize(table, model, enumerate_viable(model))
        print(render_report(mechanism_report(summary, algorithm='exhaustive'), args.format), end='')
        return EXIT_OK

    def run_scenarios(self, args):
        model = self._load_model(args.model)
        counts = count_scenarios(model)
        logger.info(f"Scenarios: total={counts[0]}, viable={counts[1]}, positive={counts[2]}")
        scenarios = enumerate_viable(model, drop_zero=not args.include_zero)
        write_scenarios_csv(sys.stdout, scenarios, counts, top_k=args.top_k)
        return EXIT_OK

    def run_casestudy(self, args):
        config = CaseStudyConfig(family=args.family, n_min=args.n_min, n_max=args.n_max, n_weak=args.weak)
        generator = CaseStudyGenerator(
            config,
            out_csv=args.out,
            delta=args.delta,
            workers=args.workers,
            budget_seconds=args.budget_seconds,
        )
        logger.debug(str(generator))
        csv_filepath = generator.write_data_to_csv()
        print(csv_filepath)
        return EXIT_OK

    def run_simulate(self, args):
        if args.n > MAX_SWEEP_CREDENTIALS:
            raise SimulationBoundsError(
                f"The success-equivalence sweep supports n <= {MAX_SWEEP_CREDENTIALS}, got {args.n}"
            )
        report = success_equivalence_sweep(args.n, args.horizon)
        output = {
            'n': report.n,
            'horizon': report.horizon,
            'checked': report.checked,
            'mismatches': len(report.mismatches),
            'result': 'pass' if report.passed else 'fail',
        }
        print(render_report(output, args.format), end='')
        for rows, scenario in report.mismatches:
            logger.error(f"Mechanism {rows} disagrees on scenario {scenario}")
        return EXIT_OK if report.passed else EXIT_FAILED

    def run_evaluate(self, args):
        model = self._load_model(args.model)
        table = read_mechanism(args.mechanism)
        if table.n != model.n:
            raise DimensionMismatchError(f"Mechanism has n={table.n} but the model has n={model.n}")

        summary = summarize(table, model, enumerate_viable(model))
        k, symmetric_success = best_symmetric(model)
        extra = {
            'symmetric_k': k,
            'symmetric_success_probability': symmetric_success,
        }
        if model.n <= PROFILE_LIMIT:
            extra['dominance_vs_symmetric'] = dominance_relation(table, threshold_table(model.n, k)).value
        if model.n <= CATALOG_LIMIT:
            extra['exhaustive_success_probability'] = exhaustive_search(model)[1]
        print(render_report(mechanism_report(summary, **extra), args.format), end='')
        return EXIT_OK

    def run(self, argv=None):
        """
        Parse the arguments and run the sub-command.

        Returns:
            int: The exit code.
        """
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            # argparse exits with 2 on bad arguments and 0 after --help
            return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

        if args.verbose:
            set_log_level('DEBUG')
        elif args.quiet:
            set_log_level('WARNING')

        handlers = {
            'search': self.run_search,
            'exhaustive': self.run_exhaustive,
            'scenarios': self.run_scenarios,
            'casestudy': self.run_casestudy,
            'simulate': self.run_simulate,
            'evaluate': self.run_evaluate,
        }
        try:
            return handlers[args.command](args)
        except MechanismDesignError as e:
            logger.error(f"{type(e).__name__}: {e}")
            return e.exit_code
        except ValueError as e:
            logger.error(f"Invalid input: {e}")
            return EXIT_INPUT_ERROR
        except Exception as e:
            logger.critical(f"Unexpected error: {e}")
            return EXIT_FAILED


def main(argv=None):
    # Attach the console handler once for the whole program
    setup_logger('root')
    return MechanismDesignerApp().run(argv)


if __name__ == '__main__':
    sys.exit(main())
