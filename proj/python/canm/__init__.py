"""Compressed positive atomic norm minimization."""

from ._canm import (
    Error,
    SchemaError,
    __version__,
    atom,
    cantor_array,
    certify,
    difference_set,
    is_complete,
    psd_project,
    run_cli,
    run_doa,
    solve,
    toeplitz,
    toeplitz_adjoint,
    vandermonde_decompose,
)

__all__ = [
    "Error",
    "SchemaError",
    "__version__",
    "atom",
    "cantor_array",
    "certify",
    "difference_set",
    "is_complete",
    "psd_project",
    "run_cli",
    "run_doa",
    "solve",
    "toeplitz",
    "toeplitz_adjoint",
    "vandermonde_decompose",
]
