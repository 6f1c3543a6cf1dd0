"""Graph-based randomized sorting: sequential, parallel-matching and concurrent sorters."""

from ._backend import compiled_available
from .analysis import (inversions, lift, misplaced_counts, recurrence_bound_check,
                       threshold_projection, zero_one_oracle)
from .async_exec import run_async
from .graph import EdgeSampler, PairWeightSpec, build_sampler, gray_code, is_gray_edge, total_weight
from .harness import ExperimentConfig, fit_scaling, run_experiment, verify_qalpha
from .parallel import (Matching, MatchingSamplerSpec, apply_matching, run_parallel,
                       sample_matching)
from .rng import Stream
from .sequential import FaultModel, SortState, compare_and_sort, run_sequential
from .stats import RunStats

__version__ = "0.1.0"

__all__ = [
    "EdgeSampler", "ExperimentConfig", "FaultModel", "Matching", "MatchingSamplerSpec",
    "PairWeightSpec", "RunStats", "SortState", "Stream", "apply_matching", "build_sampler",
    "compare_and_sort", "compiled_available", "fit_scaling", "gray_code", "inversions",
    "is_gray_edge", "lift", "misplaced_counts", "recurrence_bound_check", "run_async",
    "run_experiment", "run_parallel", "run_sequential", "sample_matching",
    "threshold_projection", "total_weight", "verify_qalpha", "zero_one_oracle",
]
