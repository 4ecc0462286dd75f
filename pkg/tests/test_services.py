import csv
import io
import json
import logging
import os
import sys

import numpy as np
import pytest

from src.credential_model import FaultModel, enumerate_viable
from src.data import path_manager
from src.errors import MechanismDesignError, MechanismFormatError, ModelValidationError
from src.mechanism import MechanismSummary, minimal_true_vectors, threshold_table
from src.services.logging_config import detailed_formatter, set_log_level, setup_logger
from src.services.mechanism_io import format_mechanism, parse_mechanism, read_mechanism, write_mechanism
from src.services.model_reader import read_fault_model, write_fault_model
from src.services.process_timer import execution_timer, format_duration
from src.services.report_writer import (
    ResultRow,
    mechanism_report,
    read_results_csv,
    read_scenarios_csv,
    render_report,
    write_results_csv,
    write_scenarios_csv,
)
from src.services.worker_pool import map_in_order, resolve_worker_count

# model_reader


def _write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_read_bundled_model():
    model = read_fault_model(path_manager.resolve_model_path('loss_leak_pair'))
    assert model.n == 2
    np.testing.assert_allclose(model.probability_matrix, [[0.9, 0.1, 0.0, 0.0], [0.9, 0.0, 0.1, 0.0]])


def test_read_model_skips_blank_lines_and_spaces(tmp_path):
    path = _write(tmp_path / 'model.csv', 'Safe, Loss, Leak, Theft\n0.9, 0.1, 0, 0\n\n0.5,0.5,0,0\n')
    assert read_fault_model(path).n == 2


def test_read_model_with_byte_order_mark(tmp_path):
    path = tmp_path / 'model.csv'
    path.write_text('safe,loss,leak,theft\n0.9,0.1,0,0\n', encoding='utf-8-sig')
    assert path.read_bytes().startswith(b'\xef\xbb\xbf')
    assert read_fault_model(str(path)).n == 1


@pytest.mark.parametrize(
    'text, message',
    [
        ('safe,loss,leak\n0.9,0.1,0\n', 'header'),
        ('safe,loss,leak,theft\n0.9,0.1,0,0\n0.9,abc,0,0\n', 'Line 3'),
        ('safe,loss,leak,theft\n0.9,0.1,0\n', 'expected 4 values'),
        ('safe,loss,leak,theft\n0.9,0.2,0,0\n', 'sum to'),
        ('safe,loss,leak,theft\n', 'at least one credential'),
        ('', 'header'),
    ],
)
def test_read_model_rejects(tmp_path, text, message):
    path = _write(tmp_path / 'model.csv', text)
    with pytest.raises(ModelValidationError, match=message):
        read_fault_model(path)


def test_read_model_missing_file(tmp_path):
    with pytest.raises(ModelValidationError):
        read_fault_model(str(tmp_path / 'missing.csv'))


def test_write_fault_model_is_read_back(tmp_path, loss_leak_pair):
    path = str(tmp_path / 'model.csv')
    write_fault_model(loss_leak_pair, path)
    assert read_fault_model(path) == loss_leak_pair


# mechanism_io


def test_format_mechanism():
    assert format_mechanism(threshold_table(2, 1)) == 'n=2\n10\n01\n'
    assert format_mechanism(threshold_table(2, 3)) == 'n=2\n'


def test_parse_mechanism():
    table = parse_mechanism('n=3\n110\n\n011\n')
    assert minimal_true_vectors(table) == (3, 6)
    assert parse_mechanism('n=2\n').true_count == 0
    assert parse_mechanism('n=2\n00\n').false_count == 0


@pytest.mark.parametrize(
    'text',
    [
        '',
        '10\n01\n',
        'n=x\n',
        'n=0\n',
        'n=2\n101\n',
        'n=2\n1a\n',
        'n=2\n10\n11\n',
    ],
)
def test_parse_mechanism_rejects(text):
    with pytest.raises(MechanismFormatError):
        parse_mechanism(text)


def test_mechanism_file(tmp_path):
    path = str(tmp_path / 'mechanism.txt')
    write_mechanism(threshold_table(3, 2), path)
    assert read_mechanism(path) == threshold_table(3, 2)
    with pytest.raises(MechanismFormatError):
        read_mechanism(str(tmp_path / 'missing.txt'))


# report_writer


def _report():
    summary = MechanismSummary(n=2, minimal_true_vectors=(1, 2), success_probability=0.99, failure_probability=0.01)
    return mechanism_report(summary, delta=1e-5, stats={'nodes_visited': 3})


def test_render_text_report():
    assert render_report(_report(), 'text') == (
        'n: 2\n'
        'minimal_true_vectors: 10,01\n'
        'success_probability: 0.99\n'
        'failure_probability: 0.01\n'
        'delta: 1e-05\n'
        'stats.nodes_visited: 3\n'
    )


def test_render_json_report():
    report = json.loads(render_report(_report(), 'json'))
    assert report['minimal_true_vectors'] == ['10', '01']
    assert report['stats'] == {'nodes_visited': 3}


def test_render_csv_report():
    header, values = list(csv.reader(io.StringIO(render_report(_report(), 'csv'))))
    assert header[:2] == ['n', 'minimal_true_vectors']
    assert dict(zip(header, values))['minimal_true_vectors'] == '10,01'
    assert header[-1] == 'stats.nodes_visited'


def test_render_unknown_format():
    with pytest.raises(ValueError):
        render_report(_report(), 'xml')


def test_results_csv(tmp_path):
    path = str(tmp_path / 'results.csv')
    rows = [
        ResultRow(2, 'search', 0.01, ('10', '01')),
        ResultRow(2, 'symmetric', 0.0100000000000001, ('10', '01')),
        ResultRow(2, 'exhaustive', 1.0, ()),
    ]
    write_results_csv(rows, path)
    with open(path, encoding='utf-8') as csv_file:
        assert csv_file.readline().strip() == 'n,algorithm,failure_probability,mechanism'
    assert read_results_csv(path) == rows


def test_read_results_csv_rejects_other_files(tmp_path):
    path = _write(tmp_path / 'other.csv', 'a,b\n1,2\n')
    with pytest.raises(MechanismDesignError):
        read_results_csv(path)


def test_scenarios_csv(tmp_path, loss_pair):
    buffer = io.StringIO()
    write_scenarios_csv(buffer, enumerate_viable(loss_pair), (16, 7, 3))
    lines = buffer.getvalue().splitlines()
    assert lines[0] == '# total=16,viable=7,positive=3'
    assert lines[1] == 'rank,user,attacker,probability,cumulative'
    assert lines[2].startswith('1,11,00,')
    assert len(lines) == 5

    path = tmp_path / 'scenarios.csv'
    path.write_text(buffer.getvalue(), encoding='utf-8')
    counts, rows = read_scenarios_csv(str(path))
    assert counts == {'total': 16, 'viable': 7, 'positive': 3}
    assert [(row.user, row.attacker) for row in rows] == [('11', '00'), ('10', '00'), ('01', '00')]
    assert rows[-1].cumulative == pytest.approx(0.99)


def test_scenarios_csv_top_k(loss_pair):
    buffer = io.StringIO()
    write_scenarios_csv(buffer, enumerate_viable(loss_pair), (16, 7, 3), top_k=1)
    assert len(buffer.getvalue().splitlines()) == 3
    buffer = io.StringIO()
    write_scenarios_csv(buffer, enumerate_viable(loss_pair), (16, 7, 3), top_k=0)
    assert len(buffer.getvalue().splitlines()) == 2


# worker_pool


def test_resolve_worker_count():
    assert resolve_worker_count(3) == 3
    assert resolve_worker_count(0) >= 1
    with pytest.raises(ValueError):
        resolve_worker_count(-1)


@pytest.mark.parametrize('workers', [1, 2])
def test_map_in_order(workers):
    assert map_in_order(abs, [-3, 2, -1, 0], workers=workers) == [3, 2, 1, 0]
    assert map_in_order(abs, [], workers=workers) == []


# process_timer


@pytest.mark.parametrize(
    'seconds, expected',
    [
        (5.5, '5.50 seconds'),
        (125, '2 minutes 5 seconds'),
        (3603, '1 hour 0 minutes 3 seconds'),
        (7260, '2 hours 1 minutes 0 seconds'),
    ],
)
def test_format_duration(seconds, expected):
    assert format_duration(seconds) == expected


def test_execution_timer_logs(caplog):
    with caplog.at_level(logging.INFO):
        execution_timer(processed_count=3, unprocessed_count=1, process_time=2.0)
    assert '3 points processed, 1 skipped' in caplog.text
    assert '2.00 seconds' in caplog.text


# logging_config


def test_root_logger_gets_one_console_handler():
    root = setup_logger('root')
    setup_logger('root')
    handlers = [handler for handler in root.handlers if handler.formatter is detailed_formatter]
    assert len(handlers) == 1


def test_set_log_level():
    logger = setup_logger('src.tests.level_check')
    set_log_level('DEBUG')
    assert logger.level == logging.DEBUG
    set_log_level(logging.WARNING)
    assert logger.level == logging.WARNING


# path_manager


def test_app_storage(tmp_path, monkeypatch):
    monkeypatch.setenv('HOME', str(tmp_path))
    linux_path = path_manager.app_storage('Linux', 'results.csv')
    assert linux_path == os.path.join(str(tmp_path), '.AuthMechDesigner', 'results.csv')
    mac_path = path_manager.app_storage('Darwin', 'results.csv')
    assert 'Application Support' in mac_path
    assert os.path.isdir(os.path.dirname(mac_path))


def test_bundled_models():
    models = path_manager.bundled_models()
    assert {'loss_pair', 'wallet_2_2', 'hetero_9', 'identical_7'} <= set(models)
    assert models == sorted(models)


def test_resolve_model_path(tmp_path):
    assert path_manager.resolve_model_path('wallet_2_1').endswith(os.path.join('models', 'wallet_2_1.csv'))
    path = _write(tmp_path / 'custom.csv', 'safe,loss,leak,theft\n1,0,0,0\n')
    assert path_manager.resolve_model_path(path) == path
    with pytest.raises(ModelValidationError):
        path_manager.resolve_model_path('no_such_model')


def test_data_path_inside_bundle(tmp_path, monkeypatch):
    monkeypatch.setattr(sys, '_MEIPASS', str(tmp_path), raising=False)
    assert path_manager.get_data_file_path('models') == os.path.join(str(tmp_path), 'src', 'data', 'models')


def test_bundled_model_sizes():
    sizes = {
        name: read_fault_model(path_manager.resolve_model_path(name)).n for name in path_manager.bundled_models()
    }
    assert sizes['wallet_2_2'] == 4
    assert sizes['questions_3_1'] == 4
    assert sizes['hetero_9'] == 9
    assert isinstance(read_fault_model(path_manager.resolve_model_path('identical_7')), FaultModel)
