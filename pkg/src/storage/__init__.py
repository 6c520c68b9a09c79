"""
Storage package.
Repository pattern for session files, model bundles and reports.
"""

# Session repository
from .session_repo import (
    load_accel,
    load_audio,
    load_labels,
    load_session,
    load_session_dir,
    save_session,
)

# Model repository
from .model_repo import (
    ModelBundle,
    calculate_md5,
    load_model_bundle,
    save_model_bundle,
)

# Report repository
from .report_repo import (
    read_json_report,
    write_csv_report,
    write_json_report,
)

__all__ = [
    # Session
    'load_audio',
    'load_accel',
    'load_labels',
    'load_session',
    'load_session_dir',
    'save_session',

    # Model
    'ModelBundle',
    'calculate_md5',
    'save_model_bundle',
    'load_model_bundle',

    # Report
    'write_json_report',
    'read_json_report',
    'write_csv_report',
]
