"""This module runs case-study sweeps over credential counts and saves the failure probabilities to a CSV file."""

import os
import time
from dataclasses import dataclass, replace
from datetime import datetime
from typing import List, Optional

from src.baselines import (
    CATALOG_LIMIT,
    all_weak_and_half,
    any_weak_or_majority,
    best_symmetric,
    exhaustive_search,
)
from src.credential_model import (
    MAX_LISTED_SCENARIOS,
    CredentialSpec,
    FaultModel,
    bits_to_string,
    can_list_positive,
    enumerate_viable,
)
from src.data.path_manager import results_dir
from src.errors import CredentialLimitError, ModelValidationError
from src.mechanism import minimal_true_vectors, success_probability, threshold_table
from src.scenario_search import SearchParams, default_delta, scenario_based_search
from src.services.logging_config import setup_logger
from src.services.process_timer import execution_timer
from src.services.report_writer import ResultRow, write_results_csv
from src.services.worker_pool import map_in_order

# Initialize logger using the setup function
logger = setup_logger(__name__)

# Sweeps stop at this many credentials in total
SWEEP_LIMIT = 12

# Smallest time limit handed to a search once a point has used up its budget
MIN_TIME_LIMIT = 1e-6

REGULAR = CredentialSpec(p_safe=0.98, p_loss=0.01, p_leak=0.01)
EASY_TO_LOSE = CredentialSpec(p_safe=0.7, p_loss=0.3)
EASY_TO_LEAK = CredentialSpec(p_safe=0.7, p_leak=0.3)
HETERO_FIRST = CredentialSpec(p_safe=0.98, p_loss=0.01, p_leak=0.01)
HETERO_REST = CredentialSpec(p_safe=0.99, p_theft=0.01)
IDENTICAL = CredentialSpec(p_safe=0.91, p_loss=0.05, p_leak=0.03, p_theft=0.01)
ONLY_LOSS = CredentialSpec(p_safe=0.99, p_loss=0.01)
ONLY_THEFT = CredentialSpec(p_safe=0.99, p_theft=0.01)
LOW_ALL = CredentialSpec(p_safe=0.988, p_loss=0.01, p_leak=0.001, p_theft=0.001)

# Families that pair n regular credentials with weak ones
WEAK_FAMILIES = ('wallet', 'questions')
FAMILIES = ('hetero', 'identical', 'wallet', 'questions', 'only_loss', 'only_theft', 'two_easy_lose', 'low_all')


def hetero_model(n):
    """Credential 1 can be lost or leaked, the others can only be stolen."""
    return FaultModel((HETERO_FIRST,) + (HETERO_REST,) * (n - 1))


def identical_model(n):
    return FaultModel.uniform(n, IDENTICAL)


def wallet_model(n_regular, n_weak):
    """Regular credentials first, then easy-to-lose ones."""
    return FaultModel((REGULAR,) * n_regular + (EASY_TO_LOSE,) * n_weak)


def questions_model(n_regular, n_weak):
    """Regular credentials first, then easy-to-leak security questions."""
    return FaultModel((REGULAR,) * n_regular + (EASY_TO_LEAK,) * n_weak)


def two_easy_lose_model(n):
    if n < 2:
        raise ModelValidationError(f"two_easy_lose needs at least 2 credentials, got {n}")
    return FaultModel((EASY_TO_LOSE,) * 2 + (REGULAR,) * (n - 2))


def build_model(family, n_regular, n_weak=0) -> FaultModel:
    """
    Fault model of one sweep point.

    Attributes:
        family (str): One of FAMILIES.
        n_regular (int): Credential count; for wallet and questions the number of regular credentials.
        n_weak (int): Number of weak credentials, wallet and questions only.

    Returns:
        FaultModel: The model with n_regular + n_weak credentials.
    """
    if family == 'wallet':
        return wallet_model(n_regular, n_weak)
    if family == 'questions':
        return questions_model(n_regular, n_weak)
    builders = {
        'hetero': hetero_model,
        'identical': identical_model,
        'only_loss': lambda n: FaultModel.uniform(n, ONLY_LOSS),
        'only_theft': lambda n: FaultModel.uniform(n, ONLY_THEFT),
        'two_easy_lose': two_easy_lose_model,
        'low_all': lambda n: FaultModel.uniform(n, LOW_ALL),
    }
    if family not in builders:
        raise ModelValidationError(f"Unknown case-study family '{family}', expected one of {FAMILIES}")
    return builders[family](n_regular)


@dataclass(frozen=True)
class CaseStudyConfig:
    """
    Sweep definition.

    Attributes:
        family (str): One of FAMILIES.
        n_min (int): First credential count (regular credentials for wallet and questions).
        n_max (int): Last credential count, inclusive.
        n_weak (int): Weak credentials added at every point; required for wallet and questions only.
    """

    family: str
    n_min: int = 1
    n_max: int = 4
    n_weak: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelValidationError(f"Unknown case-study family '{self.family}', expected one of {FAMILIES}")
        if not 1 <= self.n_min <= self.n_max:
            raise ModelValidationError(f"Expected 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.family in WEAK_FAMILIES and self.n_weak < 1:
            raise ModelValidationError(f"Family '{self.family}' needs at least one weak credential")
        if self.family not in WEAK_FAMILIES and self.n_weak:
            raise ModelValidationError(f"Family '{self.family}' takes no weak credentials")

    def points(self):
        return list(range(self.n_min, self.n_max + 1))


@dataclass(frozen=True)
class SweepPoint:
    family: str
    n_regular: int
    n_weak: int
    delta: Optional[float] = None
    time_limit: Optional[float] = None

    @property
    def n(self):
        return self.n_regular + self.n_weak


def _bitstrings(table):
    return tuple(bits_to_string(vector, table.n) for vector in minimal_true_vectors(table))


def _search_row(model, point, algorithm, time_limit):
    delta = point.delta if point.delta is not None else default_delta(model.n)
    result = scenario_based_search(model, SearchParams(delta=delta, time_limit=time_limit))
    if not result.delta_certified:
        logger.warning(f"{algorithm} at n={model.n} stopped early, the row is not delta-certified")
    return ResultRow(model.n, algorithm, result.failure_probability, _bitstrings(result.best_table))


def _time_left(point, time_start):
    """Seconds of the point's time limit not used yet; None without a limit."""
    if point.time_limit is None:
        return None
    # floored so SearchParams stays valid; an exhausted limit stops the search at once
    return max(point.time_limit - (time.perf_counter() - time_start), MIN_TIME_LIMIT)


def structured_table(family, n_regular, n_weak):
    """Closed-form mechanism of a weak-credential family."""
    if family == 'wallet':
        return any_weak_or_majority(n_regular, n_weak)
    if family == 'questions':
        return all_weak_and_half(n_regular, n_weak)
    return None


def evaluate_point(point: SweepPoint) -> List[ResultRow]:
    """
    Compute every result row of one sweep point.

    Rows: search, symmetric, exhaustive (n <= 5), and for wallet and questions the closed-form
    mechanism (structured) and the search over the regular credentials alone (regular_only).
    The two searches share point.time_limit: regular_only gets what the main search left.
    """
    time_start = time.perf_counter()
    model = build_model(point.family, point.n_regular, point.n_weak)
    rows = [_search_row(model, point, 'search', _time_left(point, time_start))]

    k, symmetric_success = best_symmetric(model)
    rows.append(ResultRow(model.n, 'symmetric', 1.0 - symmetric_success, _bitstrings(threshold_table(model.n, k))))

    if model.n <= CATALOG_LIMIT:
        table, exhaustive_success = exhaustive_search(model)
        rows.append(ResultRow(model.n, 'exhaustive', 1.0 - exhaustive_success, _bitstrings(table)))

    structured = structured_table(point.family, point.n_regular, point.n_weak)
    if structured is not None:
        structured_success = success_probability(structured, model, enumerate_viable(model))
        rows.append(ResultRow(model.n, 'structured', 1.0 - structured_success, _bitstrings(structured)))
        regular_model = FaultModel((REGULAR,) * point.n_regular)
        rows.append(_search_row(regular_model, point, 'regular_only', _time_left(point, time_start)))

    return rows


def evaluate_point_or_skip(point: SweepPoint) -> Optional[List[ResultRow]]:
    """evaluate_point, or None with a warning when the point exceeds a size limit."""
    try:
        return evaluate_point(point)
    except CredentialLimitError as e:
        logger.warning(f"Skipping n={point.n}: {e}")
        return None


class CaseStudyGenerator:
    """
    A class to run a case-study sweep and save one CSV row per algorithm and credential count.

    Methods:
        collect_rows():
            Evaluates every feasible sweep point and returns the result rows.

        write_data_to_csv():
            Writes the result rows to a CSV file with header `n,algorithm,failure_probability,mechanism`.

        __str__():
            Returns a string representation of the CaseStudyGenerator instance.
    """

    def __init__(self, config: CaseStudyConfig, out_csv=None, delta=None, workers=1, budget_seconds=None):
        """
        Initialize the CaseStudyGenerator.

        Attributes:
            config (CaseStudyConfig): The sweep to run.
            out_csv (str, optional): Path of the CSV file to write.
                                     Defaults to a time-stamped file in the application results directory.
            delta (float, optional): Pruning margin; default_delta(n) per point if not provided.
            workers (int): Worker processes for the sweep points, 0 for one per physical core.
            budget_seconds (float, optional): Wall-clock budget for the whole sweep.
        """
        self.config = config
        self.out_csv = out_csv
        self.delta = delta
        self.workers = workers
        self.budget_seconds = budget_seconds

    def _feasible_points(self):
        points = []
        for n_regular in self.config.points():
            total = n_regular + self.config.n_weak
            if total > SWEEP_LIMIT:
                logger.warning(f"Skipping n={total}: sweeps are capped at {SWEEP_LIMIT} credentials")
                continue
            if self.config.family == 'two_easy_lose' and total < 2:
                logger.warning(f"Skipping n={total}: two_easy_lose needs at least 2 credentials")
                continue
            if not can_list_positive(build_model(self.config.family, n_regular, self.config.n_weak)):
                logger.warning(
                    f"Skipping n={total}: more than {MAX_LISTED_SCENARIOS} positive-probability scenarios"
                )
                continue
            points.append(
                SweepPoint(
                    family=self.config.family,
                    n_regular=n_regular,
                    n_weak=self.config.n_weak,
                    delta=self.delta,
                    time_limit=self.budget_seconds,
                )
            )
        return points

    def collect_rows(self):
        """Evaluate the sweep and return its rows in ascending credential count."""
        # Record the start time of the sweep
        time_start = time.perf_counter()

        points = self._feasible_points()
        skipped = len(self.config.points()) - len(points)
        logger.info(f"Case study '{self.config.family}' has started! {len(points)} points to evaluate.")

        if self.workers == 1 and self.budget_seconds is not None:
            # Sequentially the budget is shared: each point gets what the previous ones left
            results = []
            for point in points:
                remaining = self.budget_seconds - (time.perf_counter() - time_start)
                if remaining <= 0:
                    logger.warning(f"Budget of {self.budget_seconds} seconds exhausted, skipping n={point.n}")
                    skipped += 1
                    continue
                results.append(evaluate_point_or_skip(replace(point, time_limit=remaining)))
        else:
            results = map_in_order(evaluate_point_or_skip, points, workers=self.workers)

        skipped += sum(point_rows is None for point_rows in results)
        results = [point_rows for point_rows in results if point_rows is not None]
        rows = [row for point_rows in results for row in point_rows]

        # Display the processing time of the sweep
        execution_timer(
            processed_count=len(results),
            unprocessed_count=skipped,
            process_time=time.perf_counter() - time_start,
        )
        return rows

    def write_data_to_csv(self):
        """Run the sweep and write its rows to the results CSV file. Returns the file path."""
        rows = self.collect_rows()

        csv_filepath = self.out_csv
        if csv_filepath is None:
            # Get the current datetime and format for the CSV file name
            current_datetime = datetime.now().strftime('%d-%m-%Y--%H-%M-%S')
            csv_filepath = os.path.join(results_dir(), f"{self.config.family}--{current_datetime}.csv")

        # Ensure destination directory exists; create if it doesn't
        dst_dir = os.path.dirname(os.path.abspath(csv_filepath))
        os.makedirs(dst_dir, exist_ok=True)

        write_results_csv(rows, csv_filepath)
        return csv_filepath

    def __str__(self):
        """
        Return a string representation of the CaseStudyGenerator instance.

        Returns:
            str: A string representation of the class instance, showing key attributes.
        """
        return (
            f"CaseStudyGenerator(\n"
            f"\tconfig={self.config},\n"
            f"\tout_csv={self.out_csv},\n"
            f"\tdelta={self.delta},\n"
            f"\tworkers={self.workers},\n"
            f"\tbudget_seconds={self.budget_seconds},\n"
            f")"
        )
