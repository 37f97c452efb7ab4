from .config import SCHEMA_VERSION, ExperimentConfig
from .harness import (run_divisibility_experiment, run_eigfree_experiment, run_experiment,
                      run_highdim_experiment, run_normal_vector_experiment,
                      run_partition_experiment, run_rank_experiment)
from .oracle import enumerate_oracle
from .result import Check, ExperimentResult
from .sampling import AtomSampler, sample_matrix, trial_stream
from .stats import statistical_verdict, wilson_interval

__all__ = [
    "SCHEMA_VERSION", "ExperimentConfig", "run_divisibility_experiment", "run_eigfree_experiment",
    "run_experiment", "run_highdim_experiment", "run_normal_vector_experiment",
    "run_partition_experiment", "run_rank_experiment", "enumerate_oracle", "Check",
    "ExperimentResult", "AtomSampler", "sample_matrix", "trial_stream", "statistical_verdict",
    "wilson_interval",
]
