"""Fuchsian codes for AWGN channels.

Integer 4-tuples of norm one in the quaternion algebra (3, -1 / Q) are sent as
single complex symbols ``gamma(tau)`` and recovered by reducing the received
point into a fundamental domain of the group.
"""
from .codec import (
    Codebook,
    LabelTriple,
    Tuple4,
    build_codebook,
    compute_rates,
    decode,
    decode_batch,
    encode,
    gen_phi,
    invert_phi,
    matrix_to_tuple,
    nuf_codebook,
    optimize_tau,
    read_codebook_csv,
    write_codebook_csv,
)
from .errors import FuchsianError
from .fuchsian import GroupPreset, available_presets, load_preset, parse_preset, reduce_point
from .simulator import ChannelConfig, SweepResult, qam_reference, run_qam_sweep, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig", "Codebook", "FuchsianError", "GroupPreset", "LabelTriple", "SweepResult", "Tuple4",
    "available_presets", "build_codebook", "compute_rates", "decode", "decode_batch", "encode", "gen_phi",
    "invert_phi", "load_preset", "matrix_to_tuple", "nuf_codebook", "optimize_tau", "parse_preset",
    "qam_reference", "read_codebook_csv", "reduce_point", "run_qam_sweep", "run_sweep", "write_codebook_csv",
]
