"""
This module simulates asynchronous executions of a Boolean mechanism between a user and an attacker.

Credentials are ideal: the public part is the SHA-256 digest of a random secret, and a proof
of availability is the secret itself. Messages are delivered by a seeded discrete-event loop.
"""

import hashlib
import heapq
import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from src.baselines import enumerate_monotone
from src.credential_model import Scenario, bits_to_string
from src.errors import (
    DimensionMismatchError,
    IncompleteTableError,
    SimulationBoundsError,
    StrategyMaskError,
)
from src.mechanism import PartialTruthTable, is_complete
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

# check_success enumerates strategies and schedulers exhaustively, keep n small
MAX_SIMULATED_CREDENTIALS = 4
MAX_SWEEP_CREDENTIALS = 3
MIN_HORIZON = 2
DEFAULT_HORIZON = 2


class Player(str, Enum):
    USER = 'user'
    ATTACKER = 'attacker'


class Winner(str, Enum):
    USER = 'user'
    ATTACKER = 'attacker'
    UNDECIDED = 'undecided'


class StrategyKind(str, Enum):
    SEND_SUBSET = 'send'
    SILENT = 'silent'
    GARBAGE = 'garbage'


@dataclass(frozen=True)
class StrategySpec:
    """
    What a player sends to the mechanism.

    Attributes:
        kind (StrategyKind): Send a credential subset, stay silent, or send an invalid message.
        mask (int): Credentials presented by SEND_SUBSET.
        step (int): Step at which the message is sent.
    """

    kind: StrategyKind
    mask: int = 0
    step: int = 0

    @classmethod
    def send_subset(cls, mask, step=0):
        return cls(StrategyKind.SEND_SUBSET, mask, step)

    @classmethod
    def silent(cls):
        return cls(StrategyKind.SILENT)

    @classmethod
    def garbage(cls, step=0):
        return cls(StrategyKind.GARBAGE, 0, step)

    def __str__(self):
        if self.kind == StrategyKind.SILENT:
            return 'silent'
        if self.kind == StrategyKind.GARBAGE:
            return f"garbage@{self.step}"
        return f"send({self.mask:b})@{self.step}"


@dataclass(frozen=True)
class SchedulerSpec:
    """
    Delivery schedule of one execution.

    Attributes:
        id_assignment (int): 0 gives the user identifier 0, 1 gives it identifier 1.
        user_delay (int): Steps between the user's send and its delivery.
        attacker_delay (int): Steps between the attacker's send and its delivery.
        user_first_on_tie (bool): Deliver the user's message first when both arrive in the same step.
        seed (int): Seed of the random tape that generates the credentials.
        horizon (int): Last step at which a message may be sent; delays are at most this too.
    """

    id_assignment: int = 0
    user_delay: int = 0
    attacker_delay: int = 0
    user_first_on_tie: bool = True
    seed: int = 0
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        if self.id_assignment not in (0, 1):
            raise SimulationBoundsError(f"id_assignment must be 0 or 1, got {self.id_assignment}")
        if self.horizon < 0:
            raise SimulationBoundsError(f"horizon must be non-negative, got {self.horizon}")
        for name in ('user_delay', 'attacker_delay'):
            delay = getattr(self, name)
            if not 0 <= delay <= self.horizon:
                raise SimulationBoundsError(f"{name}={delay} outside [0, {self.horizon}]")

    def player_id(self, player: Player) -> int:
        user_id = self.id_assignment
        return user_id if player == Player.USER else 1 - user_id


class TraceEvent(NamedTuple):
    step: int
    actor: str
    event: str
    payload: str

    def dump(self) -> str:
        return f"{self.step}|{self.actor}|{self.event}|{self.payload}"


@dataclass(frozen=True)
class ExecutionTrace:
    """Ordered send, deliver and decide events of one execution, and who won it."""

    events: Tuple[TraceEvent, ...]
    winner: Winner
    decided_id: Optional[int] = None

    def dump(self) -> str:
        """One event per line, `step|actor|event|payload`."""
        return '\n'.join(event.dump() for event in self.events)


class IdealCredentialSet:
    """
    n credentials as (public, secret) pairs.

    A proof verifies iff it is the secret whose digest is the public part, so a player
    can only present credentials it was given.
    """

    def __init__(self, n, seed=0):
        # Random tape of the execution
        rng = random.Random(seed)
        self.n = n
        self._secrets = tuple(rng.getrandbits(128).to_bytes(16, 'big') for _ in range(n))
        self.public_parts = tuple(hashlib.sha256(secret).hexdigest() for secret in self._secrets)

    def secrets_for(self, vector) -> Dict[int, bytes]:
        """Secret parts of the credentials available in vector, keyed by credential index."""
        return {i: self._secrets[i] for i in range(self.n) if (vector >> i) & 1}

    def verify(self, index, secret) -> bool:
        if not 0 <= index < self.n or not isinstance(secret, bytes):
            return False
        return hashlib.sha256(secret).hexdigest() == self.public_parts[index]

    def availability(self, proofs) -> Optional[int]:
        """Availability vector proven by a message, or None if the message is not a valid credential set."""
        if not isinstance(proofs, dict):
            return None
        vector = 0
        for index, secret in proofs.items():
            if not self.verify(index, secret):
                return None
            vector |= 1 << index
        return vector


@lru_cache(maxsize=64)
def _credential_set(n, seed):
    return IdealCredentialSet(n, seed)


class BooleanMechanism:
    """One-shot automaton of a complete table: it decides on the first delivered message and ignores the rest."""

    def __init__(self, table: PartialTruthTable, credentials: IdealCredentialSet):
        self.table = table
        self.credentials = credentials
        self.decided_id = None

    def on_message(self, sender_id, proofs) -> Optional[int]:
        if self.decided_id is not None:
            return None
        vector = self.credentials.availability(proofs)
        if vector is not None and self.table.evaluate(vector):
            self.decided_id = sender_id
        else:
            self.decided_id = 1 - sender_id
        return self.decided_id


def _check_strategy(player, strategy, vector, horizon, n):
    if strategy.kind == StrategyKind.SEND_SUBSET and (strategy.mask & ~vector or strategy.mask >> n):
        raise StrategyMaskError(
            f"{player.value} strategy presents {bits_to_string(strategy.mask, n)} "
            f"but holds {bits_to_string(vector, n)}"
        )
    if strategy.kind != StrategyKind.SILENT and not 0 <= strategy.step <= horizon:
        raise SimulationBoundsError(
            f"{player.value} sends at step {strategy.step}, outside [0, {horizon}]"
        )


def run_execution(
    table: PartialTruthTable,
    scenario: Scenario,
    user: StrategySpec,
    attacker: StrategySpec,
    scheduler: SchedulerSpec,
) -> ExecutionTrace:
    """
    Run one execution and report the winner.

    Each non-silent strategy sends one message at its step, delivered after the player's delay.
    The mechanism decides on the first delivery: the sender if the message proves a credential set
    the table accepts, the other player otherwise. No delivery at all leaves the execution undecided.

    Attributes:
        table (PartialTruthTable): Complete table of the mechanism.
        scenario (Scenario): Credentials held by the user and the attacker.
        user (StrategySpec): User strategy.
        attacker (StrategySpec): Attacker strategy.
        scheduler (SchedulerSpec): Identifier assignment, delays and tie order.

    Returns:
        ExecutionTrace: The events and the winner.
    """
    n = table.n
    if not is_complete(table):
        raise IncompleteTableError("Only complete tables can be simulated")
    if scenario.user >> n or scenario.attacker >> n:
        raise DimensionMismatchError(f"Scenario {scenario} does not fit n={n}")
    _check_strategy(Player.USER, user, scenario.user, scheduler.horizon, n)
    _check_strategy(Player.ATTACKER, attacker, scenario.attacker, scheduler.horizon, n)

    credentials = _credential_set(n, scheduler.seed)
    mechanism = BooleanMechanism(table, credentials)
    holdings = {Player.USER: scenario.user, Player.ATTACKER: scenario.attacker}
    delays = {Player.USER: scheduler.user_delay, Player.ATTACKER: scheduler.attacker_delay}
    tie_rank = {
        Player.USER: 0 if scheduler.user_first_on_tie else 1,
        Player.ATTACKER: 1 if scheduler.user_first_on_tie else 0,
    }

    # Queue entries: (step, phase, tie rank, entry order, player, strategy); sends precede deliveries within a step
    queue = []
    entry_order = itertools.count()
    for player, strategy in ((Player.USER, user), (Player.ATTACKER, attacker)):
        if strategy.kind != StrategyKind.SILENT:
            heapq.heappush(queue, (strategy.step, 0, tie_rank[player], next(entry_order), player, strategy))

    events: List[TraceEvent] = []
    while queue:
        step, phase, rank, _, player, strategy = heapq.heappop(queue)
        label = 'garbage' if strategy.kind == StrategyKind.GARBAGE else bits_to_string(strategy.mask, n)
        if phase == 0:
            events.append(TraceEvent(step, player.value, 'send', label))
            heapq.heappush(queue, (step + delays[player], 1, rank, next(entry_order), player, strategy))
            continue

        events.append(TraceEvent(step, player.value, 'deliver', label))
        if strategy.kind == StrategyKind.GARBAGE:
            proofs = None
        else:
            proofs = credentials.secrets_for(strategy.mask & holdings[player])
        decided_id = mechanism.on_message(scheduler.player_id(player), proofs)
        if decided_id is not None:
            winner = Winner.USER if decided_id == scheduler.player_id(Player.USER) else Winner.ATTACKER
            events.append(TraceEvent(step, 'mechanism', 'decide', f"id={decided_id} winner={winner.value}"))

    if mechanism.decided_id is None:
        return ExecutionTrace(events=tuple(events), winner=Winner.UNDECIDED)
    winner = Winner.USER if mechanism.decided_id == scheduler.player_id(Player.USER) else Winner.ATTACKER
    return ExecutionTrace(events=tuple(events), winner=winner, decided_id=mechanism.decided_id)


def _submasks(vector) -> List[int]:
    masks = []
    sub = vector
    while True:
        masks.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & vector
    return sorted(masks)


def enumerate_attacker_strategies(sigma_a, horizon) -> Iterator[StrategySpec]:
    """Silent, every subset of sigma_a at every step up to horizon, and garbage at every step."""
    yield StrategySpec.silent()
    for step in range(horizon + 1):
        for mask in _submasks(sigma_a):
            yield StrategySpec.send_subset(mask, step)
    for step in range(horizon + 1):
        yield StrategySpec.garbage(step)


def enumerate_schedulers(horizon, seed=0) -> Iterator[SchedulerSpec]:
    """Both identifier assignments, every pair of delays up to horizon, both tie orders."""
    delays = range(horizon + 1)
    for id_assignment, user_delay, attacker_delay, user_first in itertools.product(
        (0, 1), delays, delays, (True, False)
    ):
        yield SchedulerSpec(
            id_assignment=id_assignment,
            user_delay=user_delay,
            attacker_delay=attacker_delay,
            user_first_on_tie=user_first,
            seed=seed,
            horizon=horizon,
        )


def check_success(table: PartialTruthTable, scenario: Scenario, horizon=DEFAULT_HORIZON) -> bool:
    """
    True iff the user wins every decided execution of the scenario.

    The user sends all of its credentials at step 0. Every attacker strategy is run against
    every scheduler; undecided executions do not count against success.
    """
    if not 1 <= table.n <= MAX_SIMULATED_CREDENTIALS:
        raise SimulationBoundsError(
            f"Simulation supports 1 <= n <= {MAX_SIMULATED_CREDENTIALS}, got {table.n}"
        )
    if horizon < MIN_HORIZON:
        raise SimulationBoundsError(f"horizon must be at least {MIN_HORIZON}, got {horizon}")

    user = StrategySpec.send_subset(scenario.user, 0)
    schedulers = tuple(enumerate_schedulers(horizon))
    for attacker in enumerate_attacker_strategies(scenario.attacker, horizon):
        for scheduler in schedulers:
            trace = run_execution(table, scenario, user, attacker, scheduler)
            if trace.winner == Winner.ATTACKER:
                logger.debug(
                    f"Attacker wins {scenario.to_string(table.n)} with {attacker} under {scheduler}"
                )
                return False
    return True


@dataclass
class SweepReport:
    """Outcome of comparing simulated success with f(user) = 1 and f(attacker) = 0."""

    n: int
    horizon: int
    checked: int = 0
    mismatches: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def success_equivalence_sweep(n, horizon=DEFAULT_HORIZON) -> SweepReport:
    """
    Simulate every monotone function on n credentials against all 4^n scenarios.

    Returns:
        SweepReport: Count of checked pairs and the (table rows, scenario) pairs that disagree.
    """
    if not 1 <= n <= MAX_SWEEP_CREDENTIALS:
        raise SimulationBoundsError(
            f"Success-equivalence sweeps support 1 <= n <= {MAX_SWEEP_CREDENTIALS}, got {n}"
        )
    report = SweepReport(n=n, horizon=horizon)
    for table in enumerate_monotone(n):
        for user, attacker in itertools.product(range(1 << n), repeat=2):
            scenario = Scenario(user, attacker)
            expected = table.evaluate(user) and not table.evaluate(attacker)
            if check_success(table, scenario, horizon) != expected:
                report.mismatches.append((table.row_string(), scenario.to_string(n)))
            report.checked += 1
    logger.info(
        f"Success-equivalence sweep n={n}, horizon={horizon}: "
        f"{report.checked} pairs checked, {len(report.mismatches)} mismatches"
    )
    return report
