"""Exact best-approximation chains and exponent estimates over Q_p."""

from .core import (
    ApproxPair,
    PAdicNumber,
    Valuation,
    digits_to_int,
    from_digits,
    from_rational,
    ilog,
    int_to_digits,
    is_prime,
    linear_form_valuation,
    load_digit_file,
    make_pair,
    pval,
    residue,
    save_digit_file,
    truncation_integer,
)
from .constructors import (
    LacunarySpec,
    RatioWitness,
    SchneiderState,
    SurgeryResult,
    SurgerySpec,
    build_digit_rule,
    build_factorial,
    build_lacunary,
    build_ratio_witness,
    lacunary_pow_exponents,
    schneider_exponent_driven,
    schneider_initial,
    schneider_ledger_csv,
    schneider_sandwich_report,
    schneider_step,
    select_block_exponent,
    surgery_pairs,
    surgery_transform,
    thue_morse_bit,
)
from .lattice import (
    NORM_MULT,
    NORM_SUP,
    NORMS,
    BestApproxChain,
    UniformWitness,
    best_mult_at_level,
    best_sup_at_level,
    chain,
    chain_from_entries,
    load_chain_entries,
    oracle_chain,
    save_chain_csv,
    uniform_minimum,
    uniform_minimum_enum,
)
from .exponents import (
    ExponentReport,
    PointwiseExponent,
    build_report,
    burn_in_index,
    cross_check_uniform,
    estimate_classical,
    estimate_multiplicative,
    load_report,
    pointwise,
    report_to_dict,
    save_report,
)
from .verify import (
    GOLDEN_UNIFORM_BOUND,
    CheckResult,
    check_chain_bounds,
    check_endlich,
    check_korollar,
    check_lacunary_sandwich,
    check_padicle,
    check_surgery_pointwise,
    checks_to_dict,
    diagnose_neu,
)

__version__ = "0.1.0"

__all__ = [
    "GOLDEN_UNIFORM_BOUND",
    "ApproxPair",
    "BestApproxChain",
    "CheckResult",
    "ExponentReport",
    "LacunarySpec",
    "NORMS",
    "NORM_MULT",
    "NORM_SUP",
    "PAdicNumber",
    "PointwiseExponent",
    "RatioWitness",
    "SchneiderState",
    "SurgeryResult",
    "SurgerySpec",
    "UniformWitness",
    "Valuation",
    "best_mult_at_level",
    "best_sup_at_level",
    "build_digit_rule",
    "build_factorial",
    "build_lacunary",
    "build_ratio_witness",
    "build_report",
    "burn_in_index",
    "chain",
    "chain_from_entries",
    "check_chain_bounds",
    "check_endlich",
    "check_korollar",
    "check_lacunary_sandwich",
    "check_padicle",
    "check_surgery_pointwise",
    "checks_to_dict",
    "cross_check_uniform",
    "diagnose_neu",
    "digits_to_int",
    "estimate_classical",
    "estimate_multiplicative",
    "from_digits",
    "from_rational",
    "ilog",
    "int_to_digits",
    "is_prime",
    "lacunary_pow_exponents",
    "linear_form_valuation",
    "load_chain_entries",
    "load_digit_file",
    "load_report",
    "make_pair",
    "oracle_chain",
    "pointwise",
    "report_to_dict",
    "pval",
    "residue",
    "save_chain_csv",
    "save_digit_file",
    "save_report",
    "schneider_exponent_driven",
    "schneider_initial",
    "schneider_ledger_csv",
    "schneider_sandwich_report",
    "schneider_step",
    "select_block_exponent",
    "surgery_pairs",
    "surgery_transform",
    "thue_morse_bit",
    "truncation_integer",
    "uniform_minimum",
    "uniform_minimum_enum",
]
