"""Module to display processing time for searches and case-study sweeps."""

from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)


def format_duration(process_time):
    """
    Render a duration in seconds the way the timer logs it.

    Attributes:
        process_time (float): Duration in seconds.

    Returns:
        str: e.g. '12.34 seconds', '2 minutes 5 seconds', '1 hour 0 minutes 3 seconds'.
    """
    if process_time < 60:
        return f"{process_time:.2f} seconds"
    if process_time < 3600:
        process_minutes = process_time // 60
        process_seconds = process_time % 60
        return f"{process_minutes:.0f} minutes {process_seconds:.0f} seconds"
    process_hours = process_time // 3600
    process_minutes = (process_time % 3600) // 60
    process_seconds = process_time % 60
    return (
        f"{process_hours:.0f} {'hour' if process_hours == 1 else 'hours'} "
        f"{process_minutes:.0f} minutes {process_seconds:.0f} seconds"
    )


def execution_timer(processed_count, unprocessed_count, process_time, unit='points'):
    """
    Log the processing time and count of processed and skipped work items.

    Attributes:
        processed_count (int): The number of items successfully processed.
        unprocessed_count (int): The number of items that were skipped or failed.
        process_time (float): The total time taken, in seconds.
        unit (str): What the items are called in the log line.
    """
    logger.info(
        f"Processing complete: "
        f"{processed_count} {unit} processed, {unprocessed_count} skipped. "
        f"Processing time is {format_duration(process_time)}."
    )
