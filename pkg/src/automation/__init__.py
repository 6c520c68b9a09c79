"""Pipeline configuration, session processing, jobs and studies."""

from .config import ConfigManager, PipelineConfig, create_config
from .pipeline import build_dataset, group_words, process_session
from .job_executor import run_eval, run_infer, run_train
from .studies import STUDIES, run_study

__all__ = [
    'PipelineConfig',
    'ConfigManager',
    'create_config',
    'process_session',
    'build_dataset',
    'group_words',
    'run_train',
    'run_infer',
    'run_eval',
    'STUDIES',
    'run_study',
]
