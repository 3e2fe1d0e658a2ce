"""Exact audits of close-to-convexity and starlikeness criteria for z*3F2(a,b,c;d,e;z)."""

from .series import (
    CoefficientSequence,
    DifferenceSequence,
    InvalidParameters,
    Kind,
    ParameterSet,
    build_sequence,
    coefficient,
    coefficient_ratio,
    difference_sequence,
    hadamard,
    pochhammer,
)
from .criteria import (
    LemmaVerdict,
    PredicateVerdict,
    ProofAuditReport,
    check_fejer,
    check_ozaki,
    check_ozaki_odd,
    proof_identity_audit,
    proof_poly,
    thm1_predicate,
    thm2_predicate,
    thm3_predicate,
    thm4_predicate,
)

__version__ = "0.1.0"
