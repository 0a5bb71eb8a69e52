"""Markov dilations of Fourier-multiplier semigroups on finite groups.

Exact symbolic construction of the crossed-product dilation of
``T_t(lambda_s) = exp(-t psi(s)) lambda_s`` for a conditionally negative
definite ``psi``, plus a Monte Carlo oracle for the Gaussian calculus it
rests on.
"""
from .cocycle import (
    CndCertificate,
    CndFunction,
    Cocycle,
    CocycleConstructionError,
    build_cocycle,
    delta_psi,
    hamming_psi,
    is_cnd,
    psi_from_descriptor,
    schoenberg_certificate,
)
from .crossed import (
    CrossedElement,
    DilationContext,
    alpha,
    conditional_E_after,
    conditional_E_t,
    cp_adjoint,
    cp_distance,
    cp_mul,
    cp_trace,
    embed_J,
    pi_t,
    pi_t_reversed,
    semigroup_T,
    takesaki_U,
)
from .dilation import DilationReport, builtin_pairs, verify_markov, verify_reversed, verify_structure
from .groups import (
    FiniteGroup,
    GroupAlgebraElement,
    GroupAxiomError,
    ga_adjoint,
    ga_mul,
    ga_trace,
    group_from_descriptor,
    make_cyclic,
    make_dihedral,
    make_from_table,
    make_hypercube,
    make_symmetric,
)
from .weyl import (
    StepVector,
    WeylPolynomial,
    conditional_expectation,
    expectation,
    inner_product,
    l2_distance,
    second_quantize,
)

__version__ = "0.1.0"
