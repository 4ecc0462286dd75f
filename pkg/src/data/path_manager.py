"""Module to check and create paths to bundled data files and to the results directory."""

import os
import platform
import sys

from src.errors import ModelValidationError

APP_NAME = 'AuthMechDesigner'
MODELS_DIR = 'models'


def app_storage(op_system, filename):
    """
    Create and return the full path to a file in the application specific storage directory.

    Attributes:
        op_system (str): The operating system name.
        filename (str): The name of the file to create or access in the app storage.

    Returns:
        str: The full path to the file in the app's storage directory.
    """
    if op_system == 'Darwin':  # macOS
        app_support_dir = os.path.expanduser(f'~/Library/Application Support/{APP_NAME}/')
    elif op_system == 'Windows':
        app_support_dir = os.path.expanduser(f'~/AppData/Local/{APP_NAME}/')
    else:
        # Other operating systems
        app_support_dir = os.path.expanduser(f'~/.{APP_NAME}')

    os.makedirs(app_support_dir, exist_ok=True)

    return os.path.join(app_support_dir, filename)


def results_dir():
    """Default directory for case-study CSV files."""
    return os.path.dirname(app_storage(platform.system(), 'results.csv'))


def get_data_file_path(filename):
    """
    Return the full path to a bundled data file, handling PyInstaller bundles and local source runs.

    Attributes:
        filename (str): Path of the file relative to src/data.

    Returns:
        str: The full file path to the data file.
    """
    # Check if running in PyInstaller bundle
    if hasattr(sys, '_MEIPASS'):
        base_dir = os.path.join(sys._MEIPASS, 'src', 'data')
    else:
        # When running directly from the source
        base_dir = os.path.dirname(os.path.abspath(__file__))

    return os.path.join(base_dir, filename)


def bundled_models():
    """Stems of the fault models shipped under src/data/models, sorted."""
    models_dir = get_data_file_path(MODELS_DIR)
    if not os.path.isdir(models_dir):
        return []
    return sorted(os.path.splitext(name)[0] for name in os.listdir(models_dir) if name.endswith('.csv'))


def resolve_model_path(model):
    """
    Resolve a model argument to a file path.

    Attributes:
        model (str): A path to a fault-model CSV file, or the stem of a bundled model such as 'wallet_2_2'.

    Returns:
        str: Path to an existing file.
    """
    if os.path.isfile(model):
        return model
    bundled = get_data_file_path(os.path.join(MODELS_DIR, f"{model}.csv"))
    if os.path.isfile(bundled):
        return bundled
    raise ModelValidationError(
        f"'{model}' is neither a file nor a bundled model. Bundled models: {', '.join(bundled_models())}"
    )
