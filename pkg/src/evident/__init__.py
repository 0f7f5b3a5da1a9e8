"""Belief functions over uncertain rules, default logic, and their combination."""

from .bext import (
    CombinedModel,
    DefaultEncoding,
    b_extensions_defaults,
    b_extensions_normal,
    b_extensions_sources,
    bel_star,
    bel_star_avg,
    bel_star_lower,
    bel_star_upper,
    k_prime_sigma,
    k_sigma_restricted,
)
from .defaults import (
    DefaultRule,
    DefaultTheory,
    delta_consistent,
    is_normal,
    m_credulous,
    m_extensions,
    reiter_extensions,
    th_gamma,
)
from .errors import ContradictorySources, RejectionLimit, ReservedAtomError, SizeLimit
from .logic import (
    BOTTOM,
    TOP,
    And,
    Bottom,
    Implies,
    InferenceRule,
    Not,
    Or,
    TheoryBase,
    Top,
    Var,
    entails,
    evaluate,
    pretty_print,
    satisfiable,
    th_closure,
    theory_equal,
    theory_subset,
)
from .frontend import KnowledgeBase, ParseError, parse_formula, parse_kb
from .montecarlo import McConfig, McEstimate, bel_mc, sample_sigma, sample_sigmas
from .sources import DS, EvidenceModel, Prioritized, Source, bel_exact, k_sigma, p_ds, p_prioritized, rho

__version__ = "0.1.0"
