from .config import SimConfig, load_config_file, parse_config_text, resolve
from .io import CSV_COLUMNS, emit, render
from .runner import RunDetail, RunResult, nmse, run_single, simulate_run, sweep

__all__ = [
    "CSV_COLUMNS",
    "RunDetail",
    "RunResult",
    "SimConfig",
    "emit",
    "load_config_file",
    "nmse",
    "parse_config_text",
    "render",
    "resolve",
    "run_single",
    "simulate_run",
    "sweep",
]
