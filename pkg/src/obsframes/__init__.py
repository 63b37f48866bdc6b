"""Observability frames for linear time-invariant networks.

Build frames from space-time sampling strategies, score them with the
least-squares and entropy estimation measures, sparsify redundant frames and
evaluate fundamental limits.
"""

from .errors import (NotAFrameError, NumericalError, ObsFrameError, ParameterError,
                     PreconditionError, StepSizeError)
from .estimation import (EstimationReport, MonteCarloReport, differential_entropy,
                         dwell_bound_rho_d, estimate_noisy, estimation_report, measure_rho_d,
                         measure_rho_e, shift_entropy_correction, shift_frame)
from .framecore import (FrameBounds, ObservabilityFrame, build_frame, is_frame,
                        leverage_scores, reconstruct)
from .harness import ExperimentConfig, run_experiment, sequential_frames, sequential_strategy
from .limits import (LimitReport, gramian, gramian_limit, limit_report, nu_of,
                     sample_count_bounds, solve_discrete_lyapunov, tradeoff_thresholds)
from .netmodel import (LtiNetwork, SamplingLocations, SpectralInfo, generate_geometric_network,
                       is_observable, matrix_exponential, minpoly_degree, rotation_network,
                       spectral_info)
from .sampling import (SamplingStrategy, check_step_size, check_time_design, delta_star,
                       full_state_strategy, periodic_strategy, random_strategy,
                       time_design_matrix)
from .sparsify import (PartitionResult, SparsificationResult, exact_chi, greedy_sparsify,
                       kappa, partition_degradations, random_partition, randomized_sparsify)

__version__ = "0.1.0"
