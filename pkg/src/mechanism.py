"""This module implements partial monotone truth tables (partial Boolean mechanisms) and their profiles."""

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Callable, FrozenSet, Iterable, Tuple

import numpy as np

from src.credential_model import (
    MAX_CREDENTIALS,
    FaultModel,
    Scenario,
    ScenarioList,
    bits_to_string,
    is_viable,
)
from src.errors import (
    CredentialLimitError,
    DimensionMismatchError,
    IncompatibleScenarioError,
    IncompleteTableError,
    NonMonotoneTableError,
)
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

# profile_of materialises |T|*|F| scenarios, keep it to small tables
PROFILE_LIMIT = 8


class Trit(IntEnum):
    """Value of a truth-table row."""

    FALSE = 0
    TRUE = 1
    UNSET = 2


@lru_cache(maxsize=None)
def _vectors(n):
    vectors = np.arange(1 << n, dtype=np.int64)
    vectors.setflags(write=False)
    return vectors


@lru_cache(maxsize=None)
def _popcounts(n):
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (_vectors(n) >> i) & 1
    counts.setflags(write=False)
    return counts


def _check_n(n):
    if not 1 <= n <= MAX_CREDENTIALS:
        raise CredentialLimitError(f"Truth tables support 1 to {MAX_CREDENTIALS} credentials, got {n}")


def _close(n, rows):
    """
    Propagate TRUE upwards and FALSE downwards.

    Raises NonMonotoneTableError when a TRUE row lies below a FALSE row.
    """
    up = rows == Trit.TRUE
    down = rows == Trit.FALSE
    for i in range(n):
        up_view = up.reshape(-1, 2, 1 << i)
        up_view[:, 1, :] |= up_view[:, 0, :]
        down_view = down.reshape(-1, 2, 1 << i)
        down_view[:, 0, :] |= down_view[:, 1, :]
    if np.any(up & down):
        raise NonMonotoneTableError("A TRUE row lies below a FALSE row")
    closed = np.full(1 << n, Trit.UNSET, dtype=np.uint8)
    closed[up] = Trit.TRUE
    closed[down] = Trit.FALSE
    return closed


class PartialTruthTable:
    """
    Dense table of 2^n trits indexed by availability vector.

    The TRUE rows are upward closed and the FALSE rows downward closed. Instances are
    immutable; every update returns a new table.
    """

    __slots__ = ('n', '_rows')

    def __init__(self, n, rows):
        """
        Initialize the table from rows that already satisfy the closure invariant.

        Use from_rows for arbitrary input, it validates and closes the rows.

        Attributes:
            n (int): Number of credentials.
            rows (np.ndarray): uint8 array of length 2^n holding Trit values.
        """
        rows = np.asarray(rows, dtype=np.uint8)
        if rows.shape != (1 << n,):
            raise DimensionMismatchError(f"Expected {1 << n} rows for n={n}, got {rows.shape}")
        rows = rows.copy()
        rows.setflags(write=False)
        self.n = n
        self._rows = rows

    @classmethod
    def from_rows(cls, n, rows: Iterable[int]):
        """Build a table from any consistent rows, closing them upward/downward."""
        _check_n(n)
        rows = np.asarray(list(rows), dtype=np.int64)
        if rows.shape != (1 << n,):
            raise DimensionMismatchError(f"Expected {1 << n} rows for n={n}, got {len(rows)}")
        if np.any((rows < 0) | (rows > Trit.UNSET)):
            raise ValueError("Rows must hold Trit values 0, 1 or 2")
        return cls(n, _close(n, rows.astype(np.uint8)))

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    def __getitem__(self, vector) -> Trit:
        return Trit(int(self._rows[vector]))

    def evaluate(self, vector) -> bool:
        """f(vector) of a complete table."""
        value = self[vector]
        if value == Trit.UNSET:
            raise IncompleteTableError(f"Row {bits_to_string(vector, self.n)} is not set")
        return value == Trit.TRUE

    @property
    def true_count(self) -> int:
        return int(np.count_nonzero(self._rows == Trit.TRUE))

    @property
    def false_count(self) -> int:
        return int(np.count_nonzero(self._rows == Trit.FALSE))

    @property
    def unset_count(self) -> int:
        return int(np.count_nonzero(self._rows == Trit.UNSET))

    def row_string(self) -> str:
        """Rows in ascending vector order, '0', '1' or '*' per row."""
        return ''.join('01*'[value] for value in self._rows)

    def __eq__(self, other):
        if not isinstance(other, PartialTruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._rows, other._rows)

    def __hash__(self):
        return hash((self.n, self._rows.tobytes()))

    def __repr__(self):
        return f"PartialTruthTable(n={self.n}, rows='{self.row_string()}')"


@dataclass(frozen=True)
class MechanismSummary:
    """Antichain form of a complete table together with its success and failure probabilities."""

    n: int
    minimal_true_vectors: Tuple[int, ...]
    success_probability: float
    failure_probability: float

    def bitstrings(self) -> Tuple[str, ...]:
        return tuple(bits_to_string(vector, self.n) for vector in self.minimal_true_vectors)


def new_table(n) -> PartialTruthTable:
    """Empty table: all rows unset except 0^n = FALSE and 1^n = TRUE."""
    _check_n(n)
    rows = np.full(1 << n, Trit.UNSET, dtype=np.uint8)
    rows[0] = Trit.FALSE
    rows[-1] = Trit.TRUE
    return PartialTruthTable(n, rows)


def _check_scenario(table, scenario):
    limit = 1 << table.n
    if not (0 <= scenario.user < limit and 0 <= scenario.attacker < limit):
        raise DimensionMismatchError(
            f"Scenario {scenario} does not fit a table with {table.n} credentials"
        )


def compatible_mask(user_values, attacker_values):
    return (
        (user_values != Trit.FALSE)
        & (attacker_values != Trit.TRUE)
        & ((user_values == Trit.UNSET) | (attacker_values == Trit.UNSET))
    )


def is_compatible(table: PartialTruthTable, scenario: Scenario) -> bool:
    """
    True iff the scenario neither contradicts the table nor is already in its profile.

    The user row must not be FALSE, the attacker row must not be TRUE, and at least one
    of the two must still be unset.
    """
    _check_scenario(table, scenario)
    user_value = table.rows[scenario.user]
    attacker_value = table.rows[scenario.attacker]
    return bool(compatible_mask(user_value, attacker_value))


def _apply_in_place(n, rows, user, attacker):
    vectors = _vectors(n)
    rows[(vectors & user) == user] = Trit.TRUE
    rows[(vectors | attacker) == attacker] = Trit.FALSE


def update_with_scenario(table: PartialTruthTable, scenario: Scenario) -> PartialTruthTable:
    """
    Add a scenario to the profile: every x >= user becomes TRUE, every y <= attacker FALSE.

    Returns:
        PartialTruthTable: A new table, the argument is left unchanged.
    """
    if not is_viable(scenario):
        raise IncompatibleScenarioError(
            f"Scenario {scenario.to_string(table.n)} is not viable and cannot enter a profile"
        )
    if not is_compatible(table, scenario):
        raise IncompatibleScenarioError(
            f"Scenario {scenario.to_string(table.n)} is incompatible with the table"
        )
    rows = table.rows.copy()
    _apply_in_place(table.n, rows, scenario.user, scenario.attacker)
    return PartialTruthTable(table.n, rows)


def is_complete(table: PartialTruthTable) -> bool:
    return not np.any(table.rows == Trit.UNSET)


def is_monotone(table: PartialTruthTable) -> bool:
    """Full check that no TRUE row lies below a FALSE row."""
    try:
        _close(table.n, table.rows)
    except NonMonotoneTableError:
        return False
    return True


def _check_dimensions(table, model, scenarios):
    if not table.n == model.n == scenarios.n:
        raise DimensionMismatchError(
            f"Table n={table.n}, model n={model.n} and scenario list n={scenarios.n} differ"
        )


def success_probability(
    table: PartialTruthTable, model: FaultModel, scenarios: ScenarioList
) -> float:
    """
    Total probability of the listed scenarios in the table's profile.

    A scenario is in the profile iff its user row is TRUE and its attacker row FALSE.
    The list must hold every positive-probability viable scenario of the model.
    """
    _check_dimensions(table, model, scenarios)
    rows = table.rows
    in_profile = (rows[scenarios.users] == Trit.TRUE) & (rows[scenarios.attackers] == Trit.FALSE)
    return math.fsum(scenarios.probabilities[in_profile])


def max_profile_additions(table: PartialTruthTable) -> int:
    """Upper bound on how many scenarios any monotone completion can add to the profile."""
    n = table.n
    size = 1 << n
    true_count, false_count = table.true_count, table.false_count
    current = true_count * false_count
    largest = max(true_count, false_count)
    if largest >= size // 2:
        if largest == true_count:
            return true_count * (size - true_count) - current
        return false_count * (size - false_count) - current
    return (4**n - 3**n) - current


def complete_arbitrarily(
    table: PartialTruthTable, remaining: ScenarioList, from_index: int = 0
) -> PartialTruthTable:
    """
    Complete a table into a monotone Boolean function.

    Compatible scenarios from remaining[from_index:] are added in list order, then every
    row that is still unset becomes FALSE. The TRUE rows are upward closed at that
    point, so the result stays monotone.
    """
    if remaining.n != table.n:
        raise DimensionMismatchError(
            f"Table n={table.n} and scenario list n={remaining.n} differ"
        )
    rows = table.rows.copy()
    users = remaining.users[from_index:]
    attackers = remaining.attackers[from_index:]
    position = 0
    while position < len(users):
        hits = np.flatnonzero(
            compatible_mask(rows[users[position:]], rows[attackers[position:]])
        )
        if not hits.size:
            break
        index = position + int(hits[0])
        _apply_in_place(table.n, rows, int(users[index]), int(attackers[index]))
        position = index + 1
    rows[rows == Trit.UNSET] = Trit.FALSE
    return PartialTruthTable(table.n, rows)


def minimal_true_vectors(table: PartialTruthTable) -> Tuple[int, ...]:
    """Antichain of minimal TRUE rows of a complete table, ascending."""
    if not is_complete(table):
        raise IncompleteTableError("Minimal true vectors need a complete table")
    rows = table.rows
    vectors = _vectors(table.n)
    is_true = rows == Trit.TRUE
    minimal = is_true.copy()
    for i in range(table.n):
        has_bit = ((vectors >> i) & 1).astype(bool)
        below_is_true = is_true[vectors & ~(1 << i)]
        minimal &= ~(has_bit & below_is_true)
    return tuple(int(vector) for vector in np.flatnonzero(minimal))


def from_minimal_vectors(n, vectors: Iterable[int]) -> PartialTruthTable:
    """Complete table whose TRUE rows are exactly the vectors above some given vector."""
    _check_n(n)
    rows = np.full(1 << n, Trit.FALSE, dtype=np.uint8)
    all_vectors = _vectors(n)
    for vector in vectors:
        if not 0 <= vector < (1 << n):
            raise DimensionMismatchError(f"Vector {vector} does not fit {n} credentials")
        rows[(all_vectors & vector) == vector] = Trit.TRUE
    return PartialTruthTable(n, rows)


def from_function(n, predicate: Callable[[int], bool]) -> PartialTruthTable:
    """Complete table of a Boolean function given as a predicate on vectors."""
    rows = [Trit.TRUE if predicate(vector) else Trit.FALSE for vector in range(1 << n)]
    return PartialTruthTable.from_rows(n, rows)


def threshold_table(n, k) -> PartialTruthTable:
    """k-of-n: TRUE iff at least k credentials are available."""
    _check_n(n)
    rows = np.where(_popcounts(n) >= k, Trit.TRUE, Trit.FALSE).astype(np.uint8)
    return PartialTruthTable(n, rows)


def profile_of(table: PartialTruthTable) -> FrozenSet[Scenario]:
    """All scenarios (u, a) with u TRUE and a FALSE; its size is |T| * |F|."""
    if table.n > PROFILE_LIMIT:
        raise CredentialLimitError(f"Profiles are only listed for n <= {PROFILE_LIMIT}")
    true_rows = np.flatnonzero(table.rows == Trit.TRUE)
    false_rows = np.flatnonzero(table.rows == Trit.FALSE)
    return frozenset(
        Scenario(int(user), int(attacker)) for user in true_rows for attacker in false_rows
    )


def summarize(
    table: PartialTruthTable, model: FaultModel, scenarios: ScenarioList
) -> MechanismSummary:
    success = success_probability(table, model, scenarios)
    return MechanismSummary(
        n=table.n,
        minimal_true_vectors=minimal_true_vectors(table),
        success_probability=success,
        failure_probability=1.0 - success,
    )
