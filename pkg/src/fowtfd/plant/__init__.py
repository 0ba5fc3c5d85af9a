"""Surrogate floating-turbine benchmark plant with injectable faults."""

from .engine import MeasurementFrame, Trace, available_engines, run_scenario, select_engine, simulate
from .equilibrium import OperatingPoint, operating_point
from .faults import (
    ALL_FAULTS, FaultSpec, apply_sensor_fault, configure_structural_fault,
    preset_faults, validate_fault_list,
)
from .io import decimate_trace, read_trace_csv, write_trace_csv
from .model import PlantModel, build_plant_model, step_plant
from .params import (
    ConfigurationError, LOAD_CASES, LoadCase, NumericError, PlantParams,
    get_load_case, with_overrides,
)
from .wind import generate_wind

__all__ = [
    "ALL_FAULTS", "ConfigurationError", "FaultSpec", "LOAD_CASES", "LoadCase",
    "MeasurementFrame", "NumericError", "OperatingPoint", "PlantModel",
    "PlantParams", "Trace", "apply_sensor_fault", "available_engines",
    "build_plant_model", "configure_structural_fault", "decimate_trace",
    "generate_wind", "get_load_case", "operating_point", "preset_faults",
    "read_trace_csv", "run_scenario", "select_engine", "simulate",
    "step_plant", "validate_fault_list", "with_overrides", "write_trace_csv",
]
