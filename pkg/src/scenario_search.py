"""This module searches for a delta-optimal monotone mechanism by branch and bound over the sorted scenarios."""

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from src.credential_model import FaultModel, ScenarioList, enumerate_viable
from src.errors import DimensionMismatchError
from src.mechanism import (
    PartialTruthTable,
    compatible_mask,
    complete_arbitrarily,
    is_complete,
    is_monotone,
    max_profile_additions,
    new_table,
    success_probability,
    update_with_scenario,
)
from src.services.logging_config import setup_logger
from src.services.process_timer import format_duration

# Initialize logger using the setup function
logger = setup_logger(__name__)

# Stored and re-evaluated success probabilities must agree within this
CERTIFY_TOLERANCE = 1e-12


def default_delta(n):
    """Pruning margin used when none is given: 1e-5 up to 9 credentials, 1e-6 above."""
    return 1e-5 if n <= 9 else 1e-6


@dataclass(frozen=True)
class SearchParams:
    """
    Search configuration.

    Attributes:
        delta (float): Pruning margin in (0, 1); the result is at most delta below the optimum.
        node_limit (int, optional): Stop after visiting this many nodes.
        time_limit (float, optional): Stop after this many seconds.
        drop_zero (bool): Search only scenarios with positive probability.
        prune (bool): Apply the delta pruning rule. Without it the search is exhaustive.
    """

    delta: float = 1e-5
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    drop_zero: bool = True
    prune: bool = True

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError(f"node_limit must be positive, got {self.node_limit}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError(f"time_limit must be positive, got {self.time_limit}")


@dataclass
class SearchStats:
    nodes_visited: int = 0
    branches_pruned: int = 0
    completions_evaluated: int = 0
    best_updates: int = 0
    elapsed: float = 0.0

    def counts(self):
        """The counters without the wall-clock time, identical across repeated runs."""
        return (
            self.nodes_visited,
            self.branches_pruned,
            self.completions_evaluated,
            self.best_updates,
        )

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SearchResult:
    """
    Best mechanism found by the search.

    Attributes:
        best_table (PartialTruthTable): Complete monotone table.
        success_probability (float): Its success probability over the model.
        params (SearchParams): Parameters the search ran with.
        stats (SearchStats): Search counters.
        delta_certified (bool): False when a node or time limit stopped the search early.
        scenario_count (int): Length of the scenario list the search walked.
    """

    best_table: PartialTruthTable
    success_probability: float
    params: SearchParams
    stats: SearchStats = field(default_factory=SearchStats)
    delta_certified: bool = True
    scenario_count: int = 0

    @property
    def failure_probability(self) -> float:
        return 1.0 - self.success_probability


def _addable_indices(table, scenarios, from_index):
    if not 0 <= from_index <= len(scenarios):
        raise ValueError(f"from_index {from_index} outside [0, {len(scenarios)}]")
    rows = table.rows
    mask = compatible_mask(
        rows[scenarios.users[from_index:]], rows[scenarios.attackers[from_index:]]
    )
    return from_index + np.flatnonzero(mask)


def addable_probabilities(
    table: PartialTruthTable, scenarios: ScenarioList, from_index: int
) -> np.ndarray:
    """
    Probabilities of the scenarios at or after from_index that are compatible with the table.

    The list is sorted, so the result is in descending order.
    """
    if table.n != scenarios.n:
        raise DimensionMismatchError(f"Table n={table.n} and scenario list n={scenarios.n} differ")
    return scenarios.probabilities[_addable_indices(table, scenarios, from_index)]


def scenario_based_search(
    model: FaultModel, params: SearchParams, seed_table: Optional[PartialTruthTable] = None
) -> SearchResult:
    """
    Find a monotone mechanism whose success probability is within params.delta of the optimum.

    Nodes are (table, index, success probability of the table). A complete table is compared
    against the best. Otherwise the probabilities of compatible scenarios from the index on are
    capped by max_profile_additions and summed; a zero sum completes the table arbitrarily, a sum
    that cannot beat the best by more than delta prunes the node, and anything else branches on
    the first compatible scenario, include before exclude.

    Attributes:
        model (FaultModel): Credential fault model.
        params (SearchParams): Search configuration.
        seed_table (PartialTruthTable, optional): Starting table, new_table(n) by default.

    Returns:
        SearchResult: The best table, its success probability and search statistics.
    """
    time_start = time.perf_counter()
    scenarios = enumerate_viable(model, drop_zero=params.drop_zero)
    root = seed_table if seed_table is not None else new_table(model.n)
    if root.n != model.n:
        raise DimensionMismatchError(f"Seed table n={root.n} does not match model n={model.n}")

    logger.info(
        f"Search started: n={model.n}, {len(scenarios)} scenarios, delta={params.delta}"
    )

    stats = SearchStats()
    best_table = None
    best_probability = 0.0
    certified = True

    def consider(table, probability):
        nonlocal best_table, best_probability
        if best_table is None or probability > best_probability:
            best_table, best_probability = table, probability
            stats.best_updates += 1
            logger.debug(f"New best success probability {probability!r} at node {stats.nodes_visited}")

    stack = [(root, 0, success_probability(root, model, scenarios))]
    while stack:
        if params.node_limit is not None and stats.nodes_visited >= params.node_limit:
            logger.warning(f"Node limit of {params.node_limit} reached, result is not delta-certified")
            certified = False
            break
        if params.time_limit is not None and time.perf_counter() - time_start >= params.time_limit:
            logger.warning(
                f"Time limit of {params.time_limit} seconds reached, result is not delta-certified"
            )
            certified = False
            break

        table, index, current = stack.pop()
        stats.nodes_visited += 1

        if is_complete(table):
            consider(table, current)
            continue

        addable = _addable_indices(table, scenarios, index)
        cap = max_profile_additions(table)
        cap_sum = math.fsum(scenarios.probabilities[addable[:cap]])

        if cap_sum == 0.0:
            completed = complete_arbitrarily(table, scenarios, index)
            stats.completions_evaluated += 1
            consider(completed, success_probability(completed, model, scenarios))
            continue

        if (
            params.prune
            and best_table is not None
            and best_probability > 0.0
            and best_probability > current + cap_sum - params.delta
        ):
            stats.branches_pruned += 1
            continue

        next_index = int(addable[0])
        scenario, _ = scenarios[next_index]
        included = update_with_scenario(table, scenario)
        # LIFO: the include branch is explored first
        stack.append((table, next_index + 1, current))
        stack.append(
            (included, next_index + 1, success_probability(included, model, scenarios))
        )

    if best_table is None:
        best_table = complete_arbitrarily(root, scenarios)
        best_probability = success_probability(best_table, model, scenarios)
        stats.completions_evaluated += 1

    stats.elapsed = time.perf_counter() - time_start
    logger.info(
        f"Search finished: success probability {best_probability!r}, "
        f"{stats.nodes_visited} nodes, {stats.branches_pruned} pruned, "
        f"{format_duration(stats.elapsed)}"
    )
    return SearchResult(
        best_table=best_table,
        success_probability=best_probability,
        params=params,
        stats=stats,
        delta_certified=certified,
        scenario_count=len(scenarios),
    )


def certify(result: SearchResult, model: FaultModel) -> bool:
    """Re-check a result: complete, monotone, and its probability re-evaluates within 1e-12."""
    table = result.best_table
    if table.n != model.n:
        logger.warning(f"Result table n={table.n} does not match model n={model.n}")
        return False
    if not is_complete(table):
        logger.warning("Result table is not complete")
        return False
    if not is_monotone(table):
        logger.warning("Result table is not monotone")
        return False
    scenarios = enumerate_viable(model, drop_zero=True)
    recomputed = success_probability(table, model, scenarios)
    if abs(recomputed - result.success_probability) > CERTIFY_TOLERANCE:
        logger.warning(
            f"Stored success probability {result.success_probability!r} differs from "
            f"re-evaluation {recomputed!r}"
        )
        return False
    return True
