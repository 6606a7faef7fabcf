"""Joint UAV trajectory and RIS phase-shift optimization."""

from .baselines import (ALGORITHMS, BenchmarkRun, heuristic_trajectory,
                        npb_average_rate, npb_schedule, run_algorithm,
                        t_npb_optimize)
from .beamforming import (PhaseSchedule, average_rate, combined_gain,
                          combined_gain_matrix, optimal_phases, rate_slot,
                          reduced_rate, snr)
from .channel import (ChannelRealization, gain_rg, gain_ug, gain_ur,
                      sample_realization)
from .convexity import (CertificateTerms, LemmaParams, f_value, grad_f,
                        hessian_certificate_terms, hessian_f,
                        lemma_params_from_link, run_lemma_verification)
from .scenario import (ConfigError, InfeasibilityError, MobilityViolation,
                       Scenario, Trajectory, check_mobility, cos_aoa_ur,
                       cos_aod_rg, d_rg, d_ug, d_ur, straight_line_trajectory)
from .sca import (IterationRecord, SCAOptions, SCAOutcome, SurrogateCoeffs,
                  run_sca, slack_from_trajectory, solve_subproblem,
                  surrogate_lower_bound, taylor_coeffs)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "BenchmarkRun", "CertificateTerms", "ChannelRealization",
    "ConfigError", "InfeasibilityError", "IterationRecord", "LemmaParams",
    "MobilityViolation", "PhaseSchedule", "SCAOptions", "SCAOutcome",
    "Scenario", "SurrogateCoeffs", "Trajectory", "average_rate",
    "check_mobility", "combined_gain", "combined_gain_matrix", "cos_aoa_ur",
    "cos_aod_rg", "d_rg", "d_ug", "d_ur", "f_value", "gain_rg", "gain_ug",
    "gain_ur", "grad_f", "heuristic_trajectory", "hessian_certificate_terms",
    "hessian_f", "lemma_params_from_link", "npb_average_rate", "npb_schedule",
    "optimal_phases", "rate_slot", "reduced_rate", "run_algorithm",
    "run_lemma_verification", "run_sca", "sample_realization",
    "slack_from_trajectory", "snr", "solve_subproblem",
    "straight_line_trajectory", "surrogate_lower_bound", "t_npb_optimize",
    "taylor_coeffs",
]
