"""Rigorous numerics for h_alpha(z) = (1 + 1/z)^(alpha z).

Exact moment sequences, special functions with error bounds, and exact
positivity certificates for the threshold beta*.
"""

from .certify import (
    BetaBracket,
    HausdorffReport,
    PositivityReport,
    RangeCertificate,
    TailCertificate,
    bracket_beta_star,
    build_PN,
    certify_PN_positive,
    estimate_alpha_star,
    hausdorff_check,
    minimize_PN,
    refute_alpha,
    remainder_upper_bound,
    tail_threshold,
    verify_moment_bound,
)
from .exactcore import (
    BigRational,
    RationalPolynomial,
    count_roots,
    isolate_positive_roots,
    refine_root,
    squarefree_part,
    sturm_sequence,
)
from .functions import (
    check_bernstein_representation,
    check_laplace_representation,
    eval_d,
    eval_F,
    eval_g,
    eval_G,
    eval_h,
    eval_M,
    eval_phi_integral,
    eval_phi_series,
    eval_rho,
    eval_tau0,
    moment_oracle,
    tau0_min,
)
from .moments import (
    MomentTable,
    a_sequence,
    binomial_transform,
    moment_table,
    p_polynomials,
    rho_coeffs,
    s_moments,
    t_moments,
)
from .precision import DomainError, EvalRequest, PrecisionError, PrecisionReal

__version__ = "0.1.0"
