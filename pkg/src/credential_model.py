"""This module models credential faults: per-credential state probabilities, scenarios and their ordering."""

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence, Tuple

import numpy as np

from src.errors import CredentialLimitError, DimensionMismatchError, ModelValidationError
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

# Largest supported number of credentials
MAX_CREDENTIALS = 14

# Listing every one of the 4^n scenarios is only done up to this size
FULL_ENUMERATION_LIMIT = 10

# Cap on the number of positive-probability scenarios materialised at once
MAX_LISTED_SCENARIOS = 4**FULL_ENUMERATION_LIMIT

SUM_TOLERANCE = 1e-12

# An availability vector is an unsigned int, bit i set iff credential i+1 is available
AvailabilityVector = int


class CredState(IntEnum):
    """State of a single credential in a scenario."""

    SAFE = 0  # only the user holds it
    LOSS = 1  # nobody holds it
    LEAK = 2  # both players hold it
    THEFT = 3  # only the attacker holds it


STATE_NAMES = ('safe', 'loss', 'leak', 'theft')

# _STATE_BY_BITS[user_bit][attacker_bit]
_STATE_BY_BITS = np.array(
    [[CredState.LOSS, CredState.THEFT], [CredState.SAFE, CredState.LEAK]], dtype=np.int64
)


def state_of(user_bit, attacker_bit):
    """
    Map the availability of one credential to its state.

    Attributes:
        user_bit (int): 1 if the user holds the credential.
        attacker_bit (int): 1 if the attacker holds the credential.

    Returns:
        CredState: The credential state.
    """
    if user_bit not in (0, 1) or attacker_bit not in (0, 1):
        raise ValueError(f"Availability bits must be 0 or 1, got ({user_bit}, {attacker_bit})")
    return CredState(int(_STATE_BY_BITS[int(user_bit)][int(attacker_bit)]))


def vector_from_bits(bits: Sequence[int]) -> AvailabilityVector:
    """Build a vector from per-credential bits, credential 1 first."""
    value = 0
    for i, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ValueError(f"Availability bits must be 0 or 1, got {bit}")
        value |= bit << i
    return value


def vector_to_bits(vector: AvailabilityVector, n: int) -> Tuple[int, ...]:
    return tuple((vector >> i) & 1 for i in range(n))


def bits_to_string(vector: AvailabilityVector, n: int) -> str:
    """Render a vector as an n-character bitstring, credential 1 leftmost."""
    return ''.join(str((vector >> i) & 1) for i in range(n))


def string_to_vector(bitstring: str) -> AvailabilityVector:
    """Parse a bitstring written with credential 1 leftmost."""
    if not bitstring or any(ch not in '01' for ch in bitstring):
        raise ValueError(f"Not a bitstring: {bitstring!r}")
    return vector_from_bits([int(ch) for ch in bitstring])


def dominates(x: AvailabilityVector, y: AvailabilityVector) -> bool:
    """x >= y in the componentwise order: every credential in y is also in x."""
    return (x & y) == y


class Scenario(NamedTuple):
    """A pair of availability vectors (user, attacker)."""

    user: AvailabilityVector
    attacker: AvailabilityVector

    @classmethod
    def from_bits(cls, user_bits, attacker_bits):
        if len(user_bits) != len(attacker_bits):
            raise DimensionMismatchError("User and attacker vectors differ in length")
        return cls(vector_from_bits(user_bits), vector_from_bits(attacker_bits))

    def encoding(self, n: int) -> int:
        """Integer key user * 2^n + attacker, used for deterministic tie-breaking."""
        return (self.user << n) | self.attacker

    def states(self, n: int) -> Tuple[CredState, ...]:
        return tuple(
            state_of((self.user >> i) & 1, (self.attacker >> i) & 1) for i in range(n)
        )

    def to_string(self, n: int) -> str:
        return f"({bits_to_string(self.user, n)},{bits_to_string(self.attacker, n)})"


def is_viable(scenario: Scenario) -> bool:
    """A scenario is viable iff at least one credential is safe, i.e. NOT user <= attacker."""
    return (scenario.user & ~scenario.attacker) != 0


@dataclass(frozen=True)
class CredentialSpec:
    """
    Fault probabilities of a single credential.

    Rows are validated to sum to 1 within SUM_TOLERANCE and then divided by their sum,
    so decimal input such as 0.98/0.01/0.01 is accepted without skewing products.
    """

    p_safe: float
    p_loss: float = 0.0
    p_leak: float = 0.0
    p_theft: float = 0.0

    def __post_init__(self):
        values = (self.p_safe, self.p_loss, self.p_leak, self.p_theft)
        for name, value in zip(STATE_NAMES, values):
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise ModelValidationError(f"Probability '{name}' is not a number: {value!r}")
            if not 0.0 <= value <= 1.0:
                raise ModelValidationError(f"Probability '{name}'={value} is outside [0, 1]")

        total = math.fsum(values)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ModelValidationError(
                f"Credential probabilities sum to {total!r}, expected 1 (tolerance {SUM_TOLERANCE})"
            )
        for name, value in zip(STATE_NAMES, values):
            object.__setattr__(self, f"p_{name}", float(value) / total)

    def probability(self, state: CredState) -> float:
        return self.as_row()[state]

    def as_row(self) -> Tuple[float, float, float, float]:
        return self.p_safe, self.p_loss, self.p_leak, self.p_theft


@dataclass(frozen=True)
class FaultModel:
    """Independent fault probabilities of n credentials, credential 1 first."""

    creds: Tuple[CredentialSpec, ...]

    def __post_init__(self):
        creds = tuple(self.creds)
        object.__setattr__(self, 'creds', creds)
        if not creds:
            raise ModelValidationError("A fault model needs at least one credential")
        if len(creds) > MAX_CREDENTIALS:
            raise CredentialLimitError(
                f"{len(creds)} credentials requested, at most {MAX_CREDENTIALS} are supported"
            )
        for cred in creds:
            if not isinstance(cred, CredentialSpec):
                raise ModelValidationError(f"Expected CredentialSpec, got {type(cred).__name__}")

    @property
    def n(self) -> int:
        return len(self.creds)

    @cached_property
    def probability_matrix(self) -> np.ndarray:
        """Array of shape (n, 4), columns ordered safe, loss, leak, theft."""
        return np.array([cred.as_row() for cred in self.creds], dtype=np.float64)

    @classmethod
    def from_rows(cls, rows):
        """Build a model from (safe, loss, leak, theft) rows."""
        return cls(tuple(CredentialSpec(*row) for row in rows))

    @classmethod
    def uniform(cls, n, spec: CredentialSpec):
        return cls((spec,) * n)

    @classmethod
    def concat(cls, *models):
        return cls(tuple(cred for model in models for cred in model.creds))

    def __str__(self):
        rows = ',\n'.join(f"\t{cred.as_row()}" for cred in self.creds)
        return f"FaultModel(n={self.n},\n{rows}\n)"


def _check_vector(vector, n):
    if not 0 <= vector < (1 << n):
        raise DimensionMismatchError(f"Vector {vector} does not fit {n} credentials")


def scenario_probability(model: FaultModel, scenario: Scenario) -> float:
    """Product over credentials of the probability of each credential's state."""
    _check_vector(scenario.user, model.n)
    _check_vector(scenario.attacker, model.n)
    return math.prod(
        cred.probability(state) for cred, state in zip(model.creds, scenario.states(model.n))
    )


@dataclass(frozen=True, eq=False)
class ScenarioList:
    """
    Viable scenarios sorted by probability, highest first.

    Ties are ordered by ascending encoding user * 2^n + attacker. The three arrays are
    parallel and must not be modified.
    """

    n: int
    users: np.ndarray
    attackers: np.ndarray
    probabilities: np.ndarray

    @classmethod
    def from_entries(cls, n, entries):
        """Build a sorted list from (Scenario, probability) pairs; non-viable pairs are dropped."""
        entries = list(entries)
        for scenario, _ in entries:
            _check_vector(scenario.user, n)
            _check_vector(scenario.attacker, n)
        users = np.array([scenario.user for scenario, _ in entries], dtype=np.int64)
        attackers = np.array([scenario.attacker for scenario, _ in entries], dtype=np.int64)
        probabilities = np.array([probability for _, probability in entries], dtype=np.float64)
        return _sorted_list(n, users, attackers, probabilities)

    def __len__(self):
        return len(self.probabilities)

    def __getitem__(self, index) -> Tuple[Scenario, float]:
        return (
            Scenario(int(self.users[index]), int(self.attackers[index])),
            float(self.probabilities[index]),
        )

    def __iter__(self) -> Iterator[Tuple[Scenario, float]]:
        for index in range(len(self)):
            yield self[index]

    def encoding(self, index) -> int:
        return (int(self.users[index]) << self.n) | int(self.attackers[index])

    def total_probability(self) -> float:
        return math.fsum(self.probabilities)


def _sorted_list(n, users, attackers, probabilities) -> ScenarioList:
    viable = (users & ~attackers) != 0
    users, attackers, probabilities = users[viable], attackers[viable], probabilities[viable]
    order = np.lexsort(((users << n) | attackers, -probabilities))
    users, attackers, probabilities = users[order], attackers[order], probabilities[order]
    for array in (users, attackers, probabilities):
        array.setflags(write=False)
    return ScenarioList(n=n, users=users, attackers=attackers, probabilities=probabilities)


def _all_pairs(model: FaultModel):
    n = model.n
    size = 1 << n
    users = np.repeat(np.arange(size, dtype=np.int64), size)
    attackers = np.tile(np.arange(size, dtype=np.int64), size)
    probabilities = np.ones(size * size, dtype=np.float64)
    matrix = model.probability_matrix
    for i in range(n):
        states = _STATE_BY_BITS[(users >> i) & 1, (attackers >> i) & 1]
        probabilities *= matrix[i][states]
    return users, attackers, probabilities


def count_positive_pairs(model: FaultModel) -> int:
    """Number of (user, attacker) pairs with positive probability, viable or not."""
    return math.prod(int(np.count_nonzero(row)) for row in model.probability_matrix)


def can_list_positive(model: FaultModel) -> bool:
    """True iff enumerate_viable(model) stays within MAX_LISTED_SCENARIOS."""
    return count_positive_pairs(model) <= MAX_LISTED_SCENARIOS


def _positive_pairs(model: FaultModel):
    matrix = model.probability_matrix
    count = count_positive_pairs(model)
    if count > MAX_LISTED_SCENARIOS:
        raise CredentialLimitError(
            f"{count} positive-probability scenarios exceed the limit of {MAX_LISTED_SCENARIOS}"
        )

    users = np.zeros(1, dtype=np.int64)
    attackers = np.zeros(1, dtype=np.int64)
    probabilities = np.ones(1, dtype=np.float64)
    for i, row in enumerate(matrix):
        parts = []
        for state in CredState:
            if row[state] <= 0.0:
                continue
            user_bit = 1 if state in (CredState.SAFE, CredState.LEAK) else 0
            attacker_bit = 1 if state in (CredState.LEAK, CredState.THEFT) else 0
            parts.append(
                (users | (user_bit << i), attackers | (attacker_bit << i), probabilities * row[state])
            )
        users = np.concatenate([part[0] for part in parts])
        attackers = np.concatenate([part[1] for part in parts])
        probabilities = np.concatenate([part[2] for part in parts])
    return users, attackers, probabilities


def enumerate_viable(model: FaultModel, drop_zero: bool = True) -> ScenarioList:
    """
    List the viable scenarios of a model, sorted by probability in descending order.

    Attributes:
        model (FaultModel): The credential fault model.
        drop_zero (bool): Keep only scenarios with positive probability.

    Returns:
        ScenarioList: The sorted scenarios.
    """
    if drop_zero:
        users, attackers, probabilities = _positive_pairs(model)
    else:
        if model.n > FULL_ENUMERATION_LIMIT:
            raise CredentialLimitError(
                f"Listing all 4^{model.n} scenarios is limited to n <= {FULL_ENUMERATION_LIMIT}"
            )
        users, attackers, probabilities = _all_pairs(model)

    scenarios = _sorted_list(model.n, users, attackers, probabilities)
    logger.debug(
        f"Enumerated {len(scenarios)} viable scenarios for n={model.n} (drop_zero={drop_zero})"
    )
    return scenarios


def count_scenarios(model: FaultModel):
    """
    Count scenarios without listing them.

    Returns:
        tuple: (total 4^n, viable 4^n - 3^n, viable with positive probability).
    """
    n = model.n
    positive = math.prod(int(np.count_nonzero(row)) for row in model.probability_matrix)
    positive_without_safe = math.prod(
        int(np.count_nonzero(row[1:])) for row in model.probability_matrix
    )
    return 4**n, 4**n - 3**n, positive - positive_without_safe


def cumulative_top_k(scenarios: ScenarioList, k: int) -> float:
    """Total probability of the first k scenarios of the list."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return math.fsum(scenarios.probabilities[:k])
