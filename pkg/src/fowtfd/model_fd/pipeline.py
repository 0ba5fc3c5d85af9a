"""Detector construction: identify, design, calibrate in one call."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..plant.engine import simulate
from ..plant.io import decimate_trace
from ..plant.params import PlantParams
from ..sysid.pipeline import identification_experiment, identify_plant, monitored_outputs
from ..sysid.subspace import IdentifiedModel
from .observer import ObserverModel, calibrate_bounds, design_observer

CALIBRATION_SEEDS = (2001, 2002, 2003, 2004)
CALIBRATION_DURATION = 300.0


def calibration_runs(obs: ObserverModel, lc_id: int,
                     params: Optional[PlantParams] = None,
                     seeds: Sequence[int] = CALIBRATION_SEEDS,
                     duration: float = CALIBRATION_DURATION):
    p = params or PlantParams()
    runs = []
    for seed in seeds:
        dec = decimate_trace(simulate(lc_id, duration=duration, seed=seed, params=p))
        y_n, u_n = obs.normalize(dec.u, monitored_outputs(dec.y))
        runs.append((u_n, y_n))
    return runs


def build_detector(lc_id: int, params: Optional[PlantParams] = None,
                   id_seed: int = 1000, order: int = 8,
                   model: Optional[IdentifiedModel] = None,
                   cal_seeds: Sequence[int] = CALIBRATION_SEEDS,
                   cal_duration: float = CALIBRATION_DURATION) -> ObserverModel:
    """Identified-model observer with calibrated threshold bounds.

    The detection bound is fitted on quiet healthy runs; the isolation-bank
    bound additionally sees the excitation experiment so it covers the
    command transients a fault-chasing controller produces.
    """
    if model is None:
        model = identify_plant(lc_id, seed=id_seed, order=order, params=params)
    obs = design_observer(model)
    runs = calibration_runs(obs, lc_id, params, cal_seeds, cal_duration)
    calibrate_bounds(obs, runs, which="detection")
    dec = identification_experiment(lc_id, seed=id_seed + 1, params=params,
                                    duration=400.0)
    y_n, u_n = obs.normalize(dec.u, monitored_outputs(dec.y))
    calibrate_bounds(obs, runs + [(u_n, y_n)], which="isolation",
                     w1_grid=(0.04,))
    return obs
