"""Closed forms, observables, drift oracles and checkpoint measurement."""

from .checkpoint import (CheckpointRecord, KindStat, SamplingPlan, checkpoint_snapshot,
                         make_checkpoint_hook)
from .formulas import (KINDS, PAPER_PARAMS, ConstantCondition, ParamSet, Thresholds,
                       bilinear_sum_bound_check, center, check_constants, envelope,
                       freedman_tail, gamma_hat, half_width, lambda_of, p_floor, p_of, p_one,
                       p_star, phi, q_upper_alt, t_of, thresholds, yuvw_strict_half_width)
from .observables import compute_R, compute_T, edges_within_neighborhood
from .oracles import (NoTriangles, decomposition_identity_check, drift_oracle_Q,
                      drift_oracle_Yu, drift_oracle_Yuv, identity_suite)

__all__ = [
    "CheckpointRecord", "KindStat", "SamplingPlan", "checkpoint_snapshot",
    "make_checkpoint_hook", "KINDS", "PAPER_PARAMS", "ConstantCondition", "ParamSet",
    "Thresholds", "bilinear_sum_bound_check", "center", "check_constants", "envelope",
    "freedman_tail", "gamma_hat", "half_width", "lambda_of", "p_floor", "p_of", "p_one",
    "p_star", "phi", "q_upper_alt", "t_of", "thresholds", "yuvw_strict_half_width",
    "compute_R", "compute_T", "edges_within_neighborhood", "NoTriangles",
    "decomposition_identity_check", "drift_oracle_Q", "drift_oracle_Yu", "drift_oracle_Yuv",
    "identity_suite",
]
