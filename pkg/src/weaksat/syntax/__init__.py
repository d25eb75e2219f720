"""Process-language frontend and file formats."""
from .ccs import (
    CcsError,
    CcsProgram,
    Nil,
    Par,
    Prefix,
    Restrict,
    StateLimitExceeded,
    Sum,
    Var,
    canonical,
    ccs_to_lts,
    format_program,
    format_term,
    parse_ccs,
)
from .formats import FormatError, read_aut, read_nfa, read_pa, write_aut, write_dot, write_nfa, write_pa

__all__ = [
    "CcsError", "CcsProgram", "Nil", "Par", "Prefix", "Restrict", "StateLimitExceeded", "Sum", "Var",
    "canonical", "ccs_to_lts", "format_program", "format_term", "parse_ccs",
    "FormatError", "read_aut", "read_nfa", "read_pa", "write_aut", "write_dot", "write_nfa", "write_pa",
]
