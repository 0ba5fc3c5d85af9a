"""Excitation design, subspace identification and model-quality scoring."""

from .gbn import ExcitationSpec, gbn
from .model_io import load_model, model_from_text, model_to_text, save_model
from .pipeline import (
    FD_DT, INPUT_SCALES, MONITORED_SCALES, identification_experiment,
    identify_plant, monitored_operating_point, monitored_outputs,
    normalize_monitored,
)
from .subspace import (
    IdentificationError, IdentifiedModel, VafError, subspace_identify, vaf,
)

__all__ = [
    "ExcitationSpec", "FD_DT", "INPUT_SCALES", "IdentificationError",
    "IdentifiedModel", "MONITORED_SCALES", "VafError", "gbn",
    "identification_experiment", "identify_plant", "load_model",
    "model_from_text", "model_to_text", "monitored_operating_point",
    "monitored_outputs", "normalize_monitored", "save_model",
    "subspace_identify", "vaf",
]
