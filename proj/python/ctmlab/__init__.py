"""Coding-theorem complexity estimates from exhaustive Turing machine runs."""

from ._core import (
    CtmTable,
    IoError,
    NotInTableError,
    ParseError,
    ValidationError,
    __version__,
    bdm,
    block_entropy,
    lz78_bit_length,
    machine_text,
    merge,
    report,
    rle_decode,
    rle_encode,
    run_space,
    shannon_entropy,
    simulate,
    space_size,
    spearman_rho,
)

__all__ = [
    "CtmTable",
    "IoError",
    "NotInTableError",
    "ParseError",
    "ValidationError",
    "bdm",
    "block_entropy",
    "lz78_bit_length",
    "machine_text",
    "merge",
    "report",
    "rle_decode",
    "rle_encode",
    "run_space",
    "shannon_entropy",
    "simulate",
    "space_size",
    "spearman_rho",
]
