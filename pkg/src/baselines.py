"""This module provides ground-truth oracles and reference mechanisms to compare the search against."""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Sequence, Tuple

import numpy as np

from src.credential_model import FaultModel, enumerate_viable
from src.errors import CredentialLimitError, DimensionMismatchError, IncompleteTableError
from src.mechanism import (
    PartialTruthTable,
    Trit,
    from_function,
    is_complete,
    profile_of,
    success_probability,
    threshold_table,
)
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

# Largest catalog built without allow_large; D(5) = 7581
CATALOG_LIMIT = 5

# Hard ceiling even with allow_large; D(6) = 7828354
LARGE_CATALOG_LIMIT = 6


@dataclass(frozen=True)
class MonotoneCatalog:
    """All monotone Boolean functions on n variables, ordered by their row string."""

    n: int
    tables: Tuple[PartialTruthTable, ...]

    def __len__(self):
        return len(self.tables)

    def __iter__(self) -> Iterator[PartialTruthTable]:
        return iter(self.tables)

    def __getitem__(self, index) -> PartialTruthTable:
        return self.tables[index]

    def non_constant(self) -> Tuple[PartialTruthTable, ...]:
        """Catalog members other than the two constant functions."""
        return tuple(table for table in self.tables if table.true_count and table.false_count)


class Dominance(str, Enum):
    EQUIVALENT = 'equivalent'
    T1_STRICT = 't1_strict'
    T2_STRICT = 't2_strict'
    INCOMPARABLE = 'incomparable'


def _row_order(n):
    """Vectors sorted by popcount, then by value."""
    return sorted(range(1 << n), key=lambda vector: (bin(vector).count('1'), vector))


@lru_cache(maxsize=None)
def _build_catalog(n):
    vectors = np.arange(1 << n, dtype=np.int64)
    order = _row_order(n)
    found = []

    # Rows are decided in ascending popcount order. When a row is reached unset,
    # everything below it is already FALSE, so only TRUE needs to propagate.
    stack = [(np.full(1 << n, Trit.UNSET, dtype=np.uint8), 0)]
    while stack:
        rows, position = stack.pop()
        while position < len(order) and rows[order[position]] != Trit.UNSET:
            position += 1
        if position == len(order):
            found.append(PartialTruthTable(n, rows))
            continue
        vector = order[position]

        false_branch = rows.copy()
        false_branch[vector] = Trit.FALSE
        stack.append((false_branch, position + 1))

        true_branch = rows.copy()
        true_branch[(vectors & vector) == vector] = Trit.TRUE
        stack.append((true_branch, position + 1))

    found.sort(key=lambda table: table.rows.tobytes())
    return MonotoneCatalog(n=n, tables=tuple(found))


def enumerate_monotone(n, allow_large=False) -> MonotoneCatalog:
    """
    Enumerate every monotone Boolean function on n variables, constants included.

    Attributes:
        n (int): Number of variables, 1 to 5 (6 with allow_large).
        allow_large (bool): Permit n = 6, which takes minutes and a lot of memory.

    Returns:
        MonotoneCatalog: The functions as complete tables in row-string order.
    """
    limit = LARGE_CATALOG_LIMIT if allow_large else CATALOG_LIMIT
    if not 1 <= n <= limit:
        raise CredentialLimitError(f"Monotone catalogs are built for 1 <= n <= {limit}, got {n}")
    catalog = _build_catalog(n)
    logger.debug(f"Catalog for n={n} holds {len(catalog)} monotone functions")
    return catalog


def exhaustive_search(model: FaultModel) -> Tuple[PartialTruthTable, float]:
    """
    Evaluate every monotone function and return the best one.

    Ties keep the earliest function in catalog order.

    Returns:
        tuple: (best complete table, its success probability).
    """
    if model.n > CATALOG_LIMIT:
        raise CredentialLimitError(
            f"Exhaustive search is limited to n <= {CATALOG_LIMIT}, model has n={model.n}"
        )
    catalog = enumerate_monotone(model.n)
    scenarios = enumerate_viable(model)

    best_table, best_probability = None, 0.0
    for table in catalog:
        probability = success_probability(table, model, scenarios)
        if best_table is None or probability > best_probability:
            best_table, best_probability = table, probability

    logger.debug(f"Exhaustive optimum over {len(catalog)} functions: {best_probability!r}")
    return best_table, best_probability


def best_symmetric(model: FaultModel) -> Tuple[int, float]:
    """
    Best k-of-n threshold mechanism, k = 1..n; the smallest k wins ties.

    Returns:
        tuple: (k, success probability).
    """
    scenarios = enumerate_viable(model)
    best_k, best_probability = None, 0.0
    for k in range(1, model.n + 1):
        probability = success_probability(threshold_table(model.n, k), model, scenarios)
        if best_k is None or probability > best_probability:
            best_k, best_probability = k, probability
    return best_k, best_probability


def _check_pair(t1, t2):
    if t1.n != t2.n:
        raise DimensionMismatchError(f"Tables have n={t1.n} and n={t2.n}")
    if not (is_complete(t1) and is_complete(t2)):
        raise IncompleteTableError("Dominance is defined for complete tables")


def dominance_relation(t1: PartialTruthTable, t2: PartialTruthTable) -> Dominance:
    """Compare the profiles of two complete tables as sets."""
    _check_pair(t1, t2)
    profile1, profile2 = profile_of(t1), profile_of(t2)
    if profile1 == profile2:
        return Dominance.EQUIVALENT
    if profile1 > profile2:
        return Dominance.T1_STRICT
    if profile1 < profile2:
        return Dominance.T2_STRICT
    return Dominance.INCOMPARABLE


def profiles_equal(t1: PartialTruthTable, t2: PartialTruthTable) -> bool:
    """
    Profile equality without listing the profiles.

    A profile is T x F, so two profiles match iff both are empty or the TRUE and FALSE sets match.
    """
    if t1.n != t2.n:
        raise DimensionMismatchError(f"Tables have n={t1.n} and n={t2.n}")
    empty1 = t1.true_count == 0 or t1.false_count == 0
    empty2 = t2.true_count == 0 or t2.false_count == 0
    if empty1 or empty2:
        return empty1 and empty2
    return np.array_equal(t1.rows == Trit.TRUE, t2.rows == Trit.TRUE) and np.array_equal(
        t1.rows == Trit.FALSE, t2.rows == Trit.FALSE
    )


def _count_available(vector, indices):
    return sum((vector >> index) & 1 for index in indices)


def k_of(n, indices: Sequence[int], k) -> PartialTruthTable:
    """TRUE iff at least k of the credentials at the given 0-based indices are available."""
    indices = tuple(indices)
    if any(not 0 <= index < n for index in indices):
        raise DimensionMismatchError(f"Credential indices {indices} do not fit n={n}")
    return from_function(n, lambda vector: _count_available(vector, indices) >= k)


def all_of(n, indices: Sequence[int]) -> PartialTruthTable:
    """AND of the credentials at the given 0-based indices."""
    indices = tuple(indices)
    return k_of(n, indices, len(indices))


def any_weak_or_majority(n_regular, n_weak) -> PartialTruthTable:
    """
    Any weak credential, or a strict majority (floor(n/2) + 1) of the regular ones.

    Regular credentials come first, weak ones after them.
    """
    n = n_regular + n_weak
    regular = range(n_regular)
    weak = range(n_regular, n)
    majority = n_regular // 2 + 1
    return from_function(
        n,
        lambda vector: _count_available(vector, weak) > 0
        or _count_available(vector, regular) >= majority,
    )


def all_weak_and_half(n_regular, n_weak) -> PartialTruthTable:
    """Every weak credential, and at least ceil(n/2) of the regular ones."""
    n = n_regular + n_weak
    regular = range(n_regular)
    weak = range(n_regular, n)
    half = (n_regular + 1) // 2
    return from_function(
        n,
        lambda vector: _count_available(vector, weak) == n_weak
        and _count_available(vector, regular) >= half,
    )
