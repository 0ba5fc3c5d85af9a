"""Model-based fault detection and isolation with adaptive thresholds."""

from .diagnosis import (
    DetectionEvent, ModelFdResult, fault_window_steps, mrrt, mrrt_table,
    run_model_fd, theta_to_raw,
)
from .fie import (
    FIE_CONFIG, FIE_IDS, FieState, FieThreshold, adaptive_gain, fie_step,
    fie_threshold, isolate, make_bank, project_params, update_params,
)
from .observer import (
    ObserverModel, ThresholdAccumulator, calibrate_bounds, certify_decay,
    design_observer, detect, fdae_step, healthy_threshold, place_observer_gain,
)
from .rbf import RbfApproximator, rbf_eval_update

__all__ = [
    "DetectionEvent", "FIE_CONFIG", "FIE_IDS", "FieState", "FieThreshold",
    "ModelFdResult", "ObserverModel", "RbfApproximator",
    "ThresholdAccumulator", "adaptive_gain", "calibrate_bounds",
    "certify_decay", "design_observer", "detect", "fault_window_steps",
    "fdae_step", "fie_step", "fie_threshold", "healthy_threshold", "isolate",
    "make_bank", "mrrt", "mrrt_table", "place_observer_gain",
    "project_params", "rbf_eval_update", "run_model_fd", "theta_to_raw",
    "update_params",
]
