"""Exact arithmetic for anti-inductive dice.

Dominance between dice under repeated summed rolls, certified tail
behavior of the difference walk, parameter-space maps for small dice,
and the late-inversion family scan.  Every probability statement is an
integer tally; no floats touch a verdict.
"""

from .core import (
    Die,
    LatticeDistribution,
    LatticeForm,
    PowerCache,
    convolve,
    die,
    difference_die,
    negate,
    parse_die,
    power,
    scale,
    shift,
    to_lattice,
)
from .dominance import (
    DominanceSequence,
    RelationLabel,
    SpanShift,
    TiltCounts,
    TrinaryCode,
    compare,
    dominance_sequence,
    first_inversion,
    is_intransitive_cycle,
    span_shift,
    tilt_counts,
    trinary_code,
)
from .edgeworth import (
    EdgeworthParams,
    ThresholdCertificate,
    certified_threshold,
    compute_params,
    error_bound,
    exhaustive_verify,
    leading_term,
)
from .errors import (
    AntidiceError,
    CertificateUnavailableError,
    CheckpointError,
    DegenerateFitError,
    DieParseError,
    GridError,
    NoLeadingTermError,
    OperationCancelled,
    SingletonSupportError,
    UnbalancedDistributionError,
)
from .inversion import (
    FamilyPoint,
    conditional_pair_distribution,
    family_die,
    first_inversion_scan,
    quadratic_fit,
    tilt_invariance_check,
)
from .mapper import (
    Domain,
    GridSpec,
    OutcomeRecord,
    die3,
    die4,
    in_fundamental_domain,
    sweep3,
    sweep4,
    write_csv,
    write_pgm,
)

__version__ = "0.1.0"

__all__ = [
    "AntidiceError",
    "CertificateUnavailableError",
    "CheckpointError",
    "DegenerateFitError",
    "Die",
    "DieParseError",
    "Domain",
    "DominanceSequence",
    "EdgeworthParams",
    "FamilyPoint",
    "GridError",
    "GridSpec",
    "LatticeDistribution",
    "LatticeForm",
    "NoLeadingTermError",
    "OperationCancelled",
    "OutcomeRecord",
    "PowerCache",
    "RelationLabel",
    "SingletonSupportError",
    "SpanShift",
    "ThresholdCertificate",
    "TiltCounts",
    "TrinaryCode",
    "UnbalancedDistributionError",
    "certified_threshold",
    "compare",
    "compute_params",
    "conditional_pair_distribution",
    "convolve",
    "die",
    "die3",
    "die4",
    "difference_die",
    "dominance_sequence",
    "error_bound",
    "exhaustive_verify",
    "family_die",
    "first_inversion",
    "first_inversion_scan",
    "in_fundamental_domain",
    "is_intransitive_cycle",
    "leading_term",
    "negate",
    "parse_die",
    "power",
    "quadratic_fit",
    "scale",
    "shift",
    "span_shift",
    "sweep3",
    "sweep4",
    "tilt_counts",
    "tilt_invariance_check",
    "to_lattice",
    "trinary_code",
    "write_csv",
    "write_pgm",
]
