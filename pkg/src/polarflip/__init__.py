"""Polar code construction, successive-cancellation decoding, and flip-decoder research tools."""

from polarflip.construction import (
    CodeSpec,
    PartitionPlan,
    build_code,
    construct_reliability,
    encode,
    polar_transform,
    assemble_frame,
)
from polarflip.crc import CrcConfig, crc_remainder, crc_check
from polarflip.channel import ChannelParams, transmit
from polarflip.sc import DecoderWorkspace, OracleOutcome, sc_decode, sc_oracle_decode
from polarflip.flip import FlipCandidateSet, FlipResult, sc_flip_decode, pscf_decode, count_complexity
from polarflip.profiling import (
    ErrorProfile,
    PartitionSuccessModel,
    profile_errors,
    select_partition_indices,
    predict_pscf_success,
)
from polarflip.harness import SimConfig, SimRecord, run_campaign, emit_results
from polarflip.errors import ContractViolation, PlanningError, InsufficientDataError

__version__ = "0.1.0"

__all__ = [
    "CodeSpec",
    "PartitionPlan",
    "build_code",
    "construct_reliability",
    "encode",
    "polar_transform",
    "assemble_frame",
    "CrcConfig",
    "crc_remainder",
    "crc_check",
    "ChannelParams",
    "transmit",
    "DecoderWorkspace",
    "OracleOutcome",
    "sc_decode",
    "sc_oracle_decode",
    "FlipCandidateSet",
    "FlipResult",
    "sc_flip_decode",
    "pscf_decode",
    "count_complexity",
    "ErrorProfile",
    "PartitionSuccessModel",
    "profile_errors",
    "select_partition_indices",
    "predict_pscf_success",
    "SimConfig",
    "SimRecord",
    "run_campaign",
    "emit_results",
    "ContractViolation",
    "PlanningError",
    "InsufficientDataError",
]
