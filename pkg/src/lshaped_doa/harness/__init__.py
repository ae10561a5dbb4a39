"""Monte Carlo experiment harness: configs, runner, metrics and CLI."""

from .config import ConfigError, ExperimentConfig
from .runner import run_monte_carlo, write_outputs
