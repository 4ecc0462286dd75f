"""This module renders reports as text, JSON or CSV, and writes and re-reads the results and scenario CSV files."""

import csv
import io
import json
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from src.credential_model import ScenarioList, bits_to_string
from src.errors import MechanismDesignError
from src.mechanism import MechanismSummary
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

REPORT_FORMATS = ('text', 'json', 'csv')
RESULTS_HEADER = ['n', 'algorithm', 'failure_probability', 'mechanism']
SCENARIOS_HEADER = ['rank', 'user', 'attacker', 'probability', 'cumulative']


class ResultRow(NamedTuple):
    n: int
    algorithm: str
    failure_probability: float
    mechanism: Tuple[str, ...]


class ScenarioRow(NamedTuple):
    rank: int
    user: str
    attacker: str
    probability: float
    cumulative: float


def mechanism_report(summary: MechanismSummary, **extra) -> Dict:
    """Report fields shared by every command that prints a mechanism."""
    report = {
        'n': summary.n,
        'minimal_true_vectors': list(summary.bitstrings()),
        'success_probability': summary.success_probability,
        'failure_probability': summary.failure_probability,
    }
    report.update(extra)
    return report


def _flatten(report):
    flat = {}
    for key, value in report.items():
        if isinstance(value, dict):
            for inner_key, inner_value in value.items():
                flat[f"{key}.{inner_key}"] = inner_value
        elif isinstance(value, (list, tuple)):
            flat[key] = ','.join(str(item) for item in value)
        else:
            flat[key] = value
    return flat


def _text_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_report(report: Dict, output_format='text') -> str:
    """
    Render a report dictionary.

    Attributes:
        report (dict): Report fields; nested dictionaries such as stats are flattened for text and CSV.
        output_format (str): 'text', 'json' or 'csv'.

    Returns:
        str: The rendered report, ending with a newline.
    """
    if output_format == 'json':
        return json.dumps(report, indent=2) + '\n'
    flat = _flatten(report)
    if output_format == 'csv':
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(list(flat))
        writer.writerow([_text_value(value) for value in flat.values()])
        return buffer.getvalue()
    if output_format == 'text':
        return ''.join(f"{key}: {_text_value(value)}\n" for key, value in flat.items())
    raise ValueError(f"Unknown output format '{output_format}', expected one of {REPORT_FORMATS}")


def write_results_csv(rows: List[ResultRow], csv_filepath):
    with open(csv_filepath, mode='w', newline='', encoding='utf-8') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            writer.writerow([row.n, row.algorithm, repr(row.failure_probability), ','.join(row.mechanism)])
    logger.info(f"Results CSV file created successfully at: {csv_filepath}")


def read_results_csv(csv_filepath) -> List[ResultRow]:
    """Re-read a results CSV written by write_results_csv or a case-study sweep."""
    rows = []
    with open(csv_filepath, mode='r', newline='', encoding='utf-8') as csv_file:
        reader = csv.reader(csv_file)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise MechanismDesignError(f"'{csv_filepath}' is not a results CSV, header {header}")
        for record in reader:
            n, algorithm, failure, mechanism = record
            rows.append(
                ResultRow(
                    n=int(n),
                    algorithm=algorithm,
                    failure_probability=float(failure),
                    mechanism=tuple(mechanism.split(',')) if mechanism else (),
                )
            )
    return rows


def write_scenarios_csv(stream, scenarios: ScenarioList, counts, top_k=None):
    """
    Write the scenario listing, highest probability first, with a running total.

    The first line is a comment with the total, viable and positive-probability counts.
    """
    total, viable, positive = counts
    stream.write(f"# total={total},viable={viable},positive={positive}\n")
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(SCENARIOS_HEADER)
    limit = len(scenarios) if top_k is None else min(top_k, len(scenarios))
    cumulative = np.cumsum(scenarios.probabilities[:limit])
    for rank in range(limit):
        scenario, probability = scenarios[rank]
        writer.writerow(
            [
                rank + 1,
                bits_to_string(scenario.user, scenarios.n),
                bits_to_string(scenario.attacker, scenarios.n),
                repr(probability),
                repr(float(cumulative[rank])),
            ]
        )


def read_scenarios_csv(csv_filepath) -> Tuple[Dict[str, int], List[ScenarioRow]]:
    """Re-read a scenario listing; returns the counts from the comment line and the rows."""
    counts = {}
    rows = []
    with open(csv_filepath, mode='r', newline='', encoding='utf-8') as csv_file:
        lines = csv_file.read().splitlines()
    data_lines = []
    for line in lines:
        if line.startswith('#'):
            for item in line[1:].strip().split(','):
                key, _, value = item.partition('=')
                counts[key] = int(value)
        elif line.strip():
            data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader, None)
    if header != SCENARIOS_HEADER:
        raise MechanismDesignError(f"'{csv_filepath}' is not a scenario listing, header {header}")
    for rank, user, attacker, probability, cumulative in reader:
        rows.append(ScenarioRow(int(rank), user, attacker, float(probability), float(cumulative)))
    return counts, rows
