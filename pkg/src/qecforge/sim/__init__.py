"""Stabilizer simulation: reference tableau, Pauli-frame sampler and DEM compiler."""
from .dem import CheckMatrix, DemError, DetectorErrorModel, ErrorMechanism, compile_dem, merge_probability
from .frame import FrameProgram, frame_sample
from .io import from_b8, from_csv, read_table, to_b8, to_csv, write_table
from .tableau import (
    NonCliffordError,
    NondeterministicError,
    Tableau,
    reference_sample,
    symbolic_record,
    tableau_run,
    tableau_sample_detectors,
    unitary_equal,
)

__all__ = [
    "CheckMatrix",
    "DemError",
    "DetectorErrorModel",
    "ErrorMechanism",
    "FrameProgram",
    "NonCliffordError",
    "NondeterministicError",
    "Tableau",
    "compile_dem",
    "frame_sample",
    "from_b8",
    "from_csv",
    "read_table",
    "to_b8",
    "to_csv",
    "write_table",
    "merge_probability",
    "reference_sample",
    "symbolic_record",
    "tableau_run",
    "tableau_sample_detectors",
    "unitary_equal",
]
