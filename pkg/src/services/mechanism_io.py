"""This module reads and writes mechanisms as a header `n=<count>` followed by one minimal true vector per line."""

import os

from src.credential_model import MAX_CREDENTIALS, bits_to_string, string_to_vector
from src.errors import MechanismFormatError
from src.mechanism import PartialTruthTable, from_minimal_vectors, minimal_true_vectors
from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)


def format_mechanism(table: PartialTruthTable) -> str:
    """Render a complete table in the mechanism text format, vectors in ascending integer order."""
    lines = [f"n={table.n}"]
    lines.extend(bits_to_string(vector, table.n) for vector in minimal_true_vectors(table))
    return '\n'.join(lines) + '\n'


def parse_mechanism(text) -> PartialTruthTable:
    """
    Parse the mechanism text format.

    The listed vectors must form an antichain; an empty list is the constant-False mechanism
    and the all-zero vector alone is the constant-True one.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith('n='):
        raise MechanismFormatError("Mechanism text must start with a header line 'n=<count>'")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise MechanismFormatError(f"Bad header line {lines[0]!r}") from None
    if not 1 <= n <= MAX_CREDENTIALS:
        raise MechanismFormatError(f"Header declares n={n}, expected 1 to {MAX_CREDENTIALS}")

    vectors = []
    for line in lines[1:]:
        if len(line) != n:
            raise MechanismFormatError(f"Vector {line!r} does not have {n} characters")
        try:
            vectors.append(string_to_vector(line))
        except ValueError as e:
            raise MechanismFormatError(str(e)) from None

    for x in vectors:
        for y in vectors:
            if x != y and (x & y) == y:
                raise MechanismFormatError(
                    f"Vectors {bits_to_string(y, n)} and {bits_to_string(x, n)} are comparable, "
                    f"minimal true vectors must form an antichain"
                )
    return from_minimal_vectors(n, vectors)


def read_mechanism(mechanism_path) -> PartialTruthTable:
    if not os.path.isfile(mechanism_path):
        raise MechanismFormatError(f"Mechanism file '{mechanism_path}' does not exist")
    with open(mechanism_path, mode='r', encoding='utf-8') as mechanism_file:
        table = parse_mechanism(mechanism_file.read())
    logger.debug(f"Read mechanism with n={table.n} from {mechanism_path}")
    return table


def write_mechanism(table: PartialTruthTable, mechanism_path):
    with open(mechanism_path, mode='w', encoding='utf-8') as mechanism_file:
        mechanism_file.write(format_mechanism(table))
