"""This module reads and writes fault-model CSV files (header `safe,loss,leak,theft`, one row per credential)."""

import csv
import os

from src.credential_model import STATE_NAMES, FaultModel
from src.errors import MechanismDesignError, ModelValidationError
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)

MODEL_HEADER = list(STATE_NAMES)


def _parse_probability(value, column, line_number):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ModelValidationError(
            f"Line {line_number}: column '{column}' is not a decimal number: {value!r}"
        ) from None


def read_fault_model(model_path) -> FaultModel:
    """
    Read a fault model from a CSV file.

    Attributes:
        model_path (str): Path to the CSV file.

    Returns:
        FaultModel: The model, credential 1 being the first data row.
    """
    if not os.path.isfile(model_path):
        raise ModelValidationError(f"Fault-model file '{model_path}' does not exist")

    rows = []
    # utf-8-sig drops the byte order mark some spreadsheet exports start with
    with open(model_path, mode='r', newline='', encoding='utf-8-sig') as csv_file:
        reader = csv.reader(csv_file)
        header = next(reader, None)
        if header is None or [column.strip().lower() for column in header] != MODEL_HEADER:
            raise ModelValidationError(
                f"'{model_path}' must start with the header '{','.join(MODEL_HEADER)}', got {header}"
            )
        for line_number, record in enumerate(reader, start=2):
            # Skip blank lines
            if not any(field.strip() for field in record):
                continue
            if len(record) != len(MODEL_HEADER):
                raise ModelValidationError(
                    f"Line {line_number}: expected {len(MODEL_HEADER)} values, got {len(record)}"
                )
            rows.append(
                tuple(
                    _parse_probability(value.strip(), column, line_number)
                    for value, column in zip(record, MODEL_HEADER)
                )
            )

    try:
        model = FaultModel.from_rows(rows)
    except MechanismDesignError as e:
        raise type(e)(f"'{model_path}': {e}") from e

    logger.debug(f"Read fault model with {model.n} credentials from {model_path}")
    return model


def write_fault_model(model: FaultModel, model_path):
    """Write a fault model in the same CSV format read_fault_model accepts."""
    with open(model_path, mode='w', newline='', encoding='utf-8') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(MODEL_HEADER)
        for cred in model.creds:
            writer.writerow([repr(value) for value in cred.as_row()])
    logger.debug(f"Wrote fault model with {model.n} credentials to {model_path}")
