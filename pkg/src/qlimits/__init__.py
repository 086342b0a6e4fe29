"""Exact q-series arithmetic for eta-quotient modular forms, with certified
verification of p-adic valuation, congruence, and Hecke-operator laws for
three built-in families (levels 32, 9, and 16)."""

from .eta import EtaQuotient, NonIntegralPrefactor, euler_expansion, euler_power
from .hecke import (
    BG,
    CASES,
    EO,
    GKO,
    BasisForm,
    CaseStudy,
    Character,
    CrossCheckMismatch,
    GapViolation,
    NonIntegralCombination,
    build_basis_form,
    build_Er,
    build_phi,
    hecke_Tpn,
)
from .series import (
    ConstantTermNonzero,
    InsufficientPrecision,
    NotAUnit,
    QSeries,
    ValCertificate,
    power_truncated,
)
from .verify import (
    CheckEntry,
    GridSpec,
    ValuationReport,
    coefficient_chain,
    nondivisibility_sweep,
    run_case_verification,
    verify_congruence_lemma,
    verify_convergence_law,
    verify_hecke_decomposition,
    verify_identity_suite,
    verify_operator_identities,
    verify_valuation_law,
    verify_vanishing_even_hecke,
)

__all__ = [
    "BG",
    "BasisForm",
    "CASES",
    "CaseStudy",
    "Character",
    "CheckEntry",
    "ConstantTermNonzero",
    "CrossCheckMismatch",
    "EO",
    "EtaQuotient",
    "GKO",
    "GapViolation",
    "GridSpec",
    "InsufficientPrecision",
    "NonIntegralCombination",
    "NonIntegralPrefactor",
    "NotAUnit",
    "QSeries",
    "ValCertificate",
    "ValuationReport",
    "build_Er",
    "build_basis_form",
    "build_phi",
    "coefficient_chain",
    "euler_expansion",
    "euler_power",
    "hecke_Tpn",
    "nondivisibility_sweep",
    "power_truncated",
    "run_case_verification",
    "verify_congruence_lemma",
    "verify_convergence_law",
    "verify_hecke_decomposition",
    "verify_identity_suite",
    "verify_operator_identities",
    "verify_valuation_law",
    "verify_vanishing_even_hecke",
]

__version__ = "0.1.0"
