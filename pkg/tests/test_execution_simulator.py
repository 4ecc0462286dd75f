import pytest

from src.credential_model import Scenario
from src.errors import IncompleteTableError, SimulationBoundsError, StrategyMaskError
from src.execution_simulator import (
    IdealCredentialSet,
    SchedulerSpec,
    StrategyKind,
    StrategySpec,
    Winner,
    check_success,
    enumerate_attacker_strategies,
    enumerate_schedulers,
    run_execution,
    success_equivalence_sweep,
)
from src.mechanism import new_table, threshold_table

AND_2 = threshold_table(2, 2)
OR_2 = threshold_table(2, 1)


def test_golden_trace_partial_replay(data_dir):
    # the attacker replays its only credential first; AND rejects it and decides for the user
    scheduler = SchedulerSpec(id_assignment=1, user_delay=1, attacker_delay=0)
    trace = run_execution(
        AND_2,
        Scenario(3, 2),
        StrategySpec.send_subset(3, 0),
        StrategySpec.send_subset(2, 0),
        scheduler,
    )
    assert trace.winner == Winner.USER
    assert trace.decided_id == 1
    expected = (data_dir / 'and_partial_replay.trace').read_text().rstrip('\n')
    assert trace.dump() == expected


def test_user_delivery_first():
    trace = run_execution(
        AND_2,
        Scenario(3, 2),
        StrategySpec.send_subset(3, 0),
        StrategySpec.send_subset(2, 0),
        SchedulerSpec(),
    )
    assert trace.winner == Winner.USER
    assert [event.event for event in trace.events] == ['send', 'send', 'deliver', 'decide', 'deliver']
    assert trace.events[3].payload == 'id=0 winner=user'


def test_attacker_wins_with_a_stolen_credential():
    trace = run_execution(
        OR_2,
        Scenario(1, 2),
        StrategySpec.send_subset(1, 0),
        StrategySpec.send_subset(2, 0),
        SchedulerSpec(user_delay=2),
    )
    assert trace.winner == Winner.ATTACKER
    assert trace.decided_id == 1


def test_tie_order_decides_simultaneous_deliveries():
    scenario = Scenario(1, 2)
    user, attacker = StrategySpec.send_subset(1, 0), StrategySpec.send_subset(2, 0)
    assert run_execution(OR_2, scenario, user, attacker, SchedulerSpec()).winner == Winner.USER
    attacker_first = SchedulerSpec(user_first_on_tie=False)
    assert run_execution(OR_2, scenario, user, attacker, attacker_first).winner == Winner.ATTACKER


def test_garbage_hands_the_decision_to_the_other_player():
    trace = run_execution(
        OR_2,
        Scenario(1, 2),
        StrategySpec.send_subset(1, 1),
        StrategySpec.garbage(0),
        SchedulerSpec(),
    )
    assert trace.winner == Winner.USER
    assert trace.events[0].payload == 'garbage'


def test_silence_leaves_the_execution_undecided():
    trace = run_execution(AND_2, Scenario(3, 0), StrategySpec.silent(), StrategySpec.silent(), SchedulerSpec())
    assert trace.winner == Winner.UNDECIDED
    assert trace.decided_id is None
    assert trace.events == ()


def test_run_execution_rejects():
    scenario = Scenario(1, 2)
    user = StrategySpec.send_subset(1, 0)
    with pytest.raises(StrategyMaskError):
        run_execution(OR_2, scenario, user, StrategySpec.send_subset(1, 0), SchedulerSpec())
    with pytest.raises(SimulationBoundsError):
        run_execution(OR_2, scenario, user, StrategySpec.send_subset(2, 3), SchedulerSpec(horizon=2))
    with pytest.raises(IncompleteTableError):
        run_execution(new_table(2), scenario, user, StrategySpec.silent(), SchedulerSpec())


@pytest.mark.parametrize(
    'kwargs',
    [
        {'id_assignment': 2},
        {'horizon': -1},
        {'user_delay': 3, 'horizon': 2},
        {'attacker_delay': -1},
    ],
)
def test_scheduler_validation(kwargs):
    with pytest.raises(SimulationBoundsError):
        SchedulerSpec(**kwargs)


def test_strategy_str():
    assert str(StrategySpec.silent()) == 'silent'
    assert str(StrategySpec.garbage(1)) == 'garbage@1'
    assert str(StrategySpec.send_subset(5, 2)) == 'send(101)@2'


def test_credentials_only_verify_their_own_secret():
    credentials = IdealCredentialSet(3, seed=7)
    proofs = credentials.secrets_for(0b101)
    assert set(proofs) == {0, 2}
    assert credentials.availability(proofs) == 0b101
    assert credentials.availability({}) == 0
    assert credentials.availability(None) is None
    assert credentials.availability({1: proofs[0]}) is None
    assert not credentials.verify(5, proofs[0])
    assert IdealCredentialSet(3, seed=7).public_parts == credentials.public_parts
    assert IdealCredentialSet(3, seed=8).public_parts != credentials.public_parts


def test_attacker_strategy_enumeration():
    strategies = list(enumerate_attacker_strategies(0b01, 2))
    assert len(strategies) == 1 + 3 * 2 + 3
    assert strategies[0].kind == StrategyKind.SILENT
    assert strategies[1] == StrategySpec.send_subset(0, 0)
    assert strategies[2] == StrategySpec.send_subset(1, 0)
    assert strategies[-1] == StrategySpec.garbage(2)


def test_scheduler_enumeration():
    schedulers = list(enumerate_schedulers(2))
    assert len(schedulers) == 2 * 3 * 3 * 2
    assert len(set(schedulers)) == len(schedulers)


@pytest.mark.parametrize(
    'table, scenario, expected',
    [
        (AND_2, Scenario(3, 2), True),
        (AND_2, Scenario(2, 0), False),
        (OR_2, Scenario(1, 2), False),
        (OR_2, Scenario(2, 0), True),
        (OR_2, Scenario(3, 3), False),
    ],
)
def test_check_success(table, scenario, expected):
    assert check_success(table, scenario) is expected


def test_check_success_bounds():
    with pytest.raises(SimulationBoundsError):
        check_success(threshold_table(5, 1), Scenario(1, 0))
    with pytest.raises(SimulationBoundsError):
        check_success(AND_2, Scenario(3, 0), horizon=1)


@pytest.mark.parametrize('n', [1, 2])
def test_success_equivalence_sweep(n):
    report = success_equivalence_sweep(n)
    assert report.passed
    assert report.checked == {1: 3, 2: 6}[n] * 4**n


@pytest.mark.slow
def test_success_equivalence_sweep_three_credentials():
    report = success_equivalence_sweep(3)
    assert report.passed
    assert report.checked == 20 * 4**3


def test_success_equivalence_sweep_bounds():
    with pytest.raises(SimulationBoundsError):
        success_equivalence_sweep(4)
