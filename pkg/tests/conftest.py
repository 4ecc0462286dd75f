"""Shared fixtures, brute-force oracles and hypothesis strategies for the test suite."""

import itertools
import logging
import math

import pytest
from hypothesis import strategies as st

from src.baselines import enumerate_monotone
from src.credential_model import CredentialSpec, FaultModel, Scenario, scenario_probability
from src.mechanism import PartialTruthTable, Trit, is_compatible, new_table, profile_of, update_with_scenario
from src.services.logging_config import detailed_formatter, set_log_level

LOSS_PRONE = (0.9, 0.1, 0.0, 0.0)
LEAK_PRONE = (0.9, 0.0, 0.1, 0.0)


@pytest.fixture
def loss_pair():
    return FaultModel.from_rows([LOSS_PRONE, LOSS_PRONE])


@pytest.fixture
def loss_leak_pair():
    return FaultModel.from_rows([LOSS_PRONE, LEAK_PRONE])


@pytest.fixture
def data_dir(request):
    return request.path.parent / 'data'


@pytest.fixture(autouse=True)
def reset_logging():
    # --verbose and --quiet change the level of every module logger, and main() attaches a console
    # handler bound to the stderr of the running test
    yield
    set_log_level(logging.INFO)
    root = logging.getLogger('root')
    for handler in list(root.handlers):
        if handler.formatter is detailed_formatter:
            root.removeHandler(handler)


# Oracles


def is_monotone_pairwise(table: PartialTruthTable) -> bool:
    """Scan every pair x >= y for rows[y] = TRUE and rows[x] = FALSE."""
    size = 1 << table.n
    for x in range(size):
        for y in range(size):
            if (x & y) == y and table[y] == Trit.TRUE and table[x] == Trit.FALSE:
                return False
    return True


def count_monotone_by_filter(n) -> int:
    """Count monotone functions among all 2^(2^n) Boolean functions on n variables."""
    size = 1 << n
    comparable = [(x, y) for x in range(size) for y in range(size) if x != y and (x & y) == y]
    count = 0
    for bits in range(1 << size):
        if all(not ((bits >> y) & 1) or (bits >> x) & 1 for x, y in comparable):
            count += 1
    return count


def monotone_completions(table: PartialTruthTable):
    """Every catalog function that agrees with the set rows of a partial table."""
    completions = []
    for candidate in enumerate_monotone(table.n):
        agrees = all(
            table[vector] == Trit.UNSET or table[vector] == candidate[vector] for vector in range(1 << table.n)
        )
        if agrees:
            completions.append(candidate)
    return completions


def profile_success(table: PartialTruthTable, model: FaultModel) -> float:
    """Success probability summed over the profile, independent of scenario lists."""
    return math.fsum(scenario_probability(model, scenario) for scenario in profile_of(table))


def oracle_optimum(model: FaultModel) -> float:
    """Best profile success over the whole monotone catalog."""
    return max(profile_success(table, model) for table in enumerate_monotone(model.n))


def all_scenarios(n):
    return [Scenario(user, attacker) for user, attacker in itertools.product(range(1 << n), repeat=2)]


# Strategies


@st.composite
def credential_specs(draw, min_safe=0.6, max_safe=0.99):
    """A credential with p_safe in [min_safe, max_safe] and the rest split over loss, leak and theft."""
    p_safe = draw(st.floats(min_value=min_safe, max_value=max_safe))
    weights = draw(st.tuples(*(st.sampled_from([0.0, 0.25, 0.5, 1.0]) | st.floats(0.0, 1.0) for _ in range(3))))
    remainder = 1.0 - p_safe
    total = sum(weights)
    if total == 0.0:
        return CredentialSpec(p_safe=p_safe, p_loss=remainder)
    p_loss = remainder * weights[0] / total
    p_leak = remainder * weights[1] / total
    p_theft = max(0.0, remainder - p_loss - p_leak)
    return CredentialSpec(p_safe=p_safe, p_loss=p_loss, p_leak=p_leak, p_theft=p_theft)


@st.composite
def fault_models(draw, min_n=1, max_n=3):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    return FaultModel(tuple(draw(credential_specs()) for _ in range(n)))


@st.composite
def partial_tables(draw, min_n=1, max_n=4):
    """Tables reached from new_table by a random sequence of compatible viable scenarios."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    table = new_table(n)
    steps = draw(st.integers(min_value=0, max_value=4))
    for _ in range(steps):
        user = draw(st.integers(0, (1 << n) - 1))
        attacker = draw(st.integers(0, (1 << n) - 1))
        scenario = Scenario(user, attacker)
        if (user & ~attacker) and is_compatible(table, scenario):
            table = update_with_scenario(table, scenario)
    return table
