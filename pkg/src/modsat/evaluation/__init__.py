"""Benchmark harness: timed runs, PAR-2 scoring, instance generation, tuning."""
from __future__ import annotations

from .generators import (FAMILIES, TRAINING_CONFIGS, DatasetManifest, generate_instances,
                         make_instance, parity_chain, pigeonhole, random_3sat)
from .harness import (WALL, WORK, WORK_RATE, RunRecord, evaluate_suite, load_formula,
                      run_dataset, run_instance, run_instance_subprocess, suite_id)
from .metrics import Par2Report, par2, penalised, speedup
from .reports import append_records, cactus, cactus_table, read_records, summary, write_report
from .tuning import SPACE, par2_objective, sample_config, tune_random

__all__ = [
    "FAMILIES", "SPACE", "TRAINING_CONFIGS", "WALL", "WORK", "WORK_RATE", "DatasetManifest",
    "Par2Report", "RunRecord", "append_records", "cactus", "cactus_table", "evaluate_suite",
    "generate_instances", "load_formula", "make_instance", "par2", "par2_objective",
    "parity_chain", "penalised", "pigeonhole", "random_3sat", "read_records", "run_dataset",
    "run_instance", "run_instance_subprocess", "sample_config", "speedup", "suite_id",
    "summary", "tune_random", "write_report",
]
