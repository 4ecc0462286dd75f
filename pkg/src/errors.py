"""Exceptions raised by the mechanism design library."""


class MechanismDesignError(Exception):
    """Base class for all library errors. `exit_code` is what the CLI returns for it."""

    exit_code = 2


class ModelValidationError(MechanismDesignError, ValueError):
    """A fault model or its CSV file is malformed."""


class DimensionMismatchError(MechanismDesignError, ValueError):
    """Vectors, tables and models disagree on the number of credentials."""


class CredentialLimitError(MechanismDesignError):
    """The number of credentials is above what an operation supports."""

    exit_code = 4


class IncompatibleScenarioError(MechanismDesignError):
    """A scenario cannot be added to a truth table without breaking monotonicity."""


class IncompleteTableError(MechanismDesignError):
    """An operation needs a complete truth table."""


class NonMonotoneTableError(MechanismDesignError):
    """A truth table violates monotonicity."""


class MechanismFormatError(MechanismDesignError):
    """A mechanism file cannot be parsed."""


class StrategyMaskError(MechanismDesignError):
    """A player strategy uses credentials the player does not hold."""


class SimulationBoundsError(MechanismDesignError):
    """Simulation horizon or credential count outside the supported range."""

    exit_code = 4
