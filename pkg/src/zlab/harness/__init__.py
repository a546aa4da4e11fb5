"""Experiment orchestration, run manifests and the ``zlab`` command line."""

from .config import ExperimentConfig, EXPERIMENTS, load_config
from .runs import RunResult, run_experiment

__all__ = ["ExperimentConfig", "EXPERIMENTS", "load_config", "RunResult", "run_experiment"]
