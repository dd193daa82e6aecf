"""Completeness of POVMs and local distinguishability of product measurements."""

from __future__ import annotations

__version__ = "0.1.0"

from .operators import (
    DEFAULT_TOL,
    hermitian_basis,
    hs_inner,
    hs_norm,
    hvec,
    inertia,
    rank_eps,
    rank_pm,
    unhvec,
)
from .povm import (
    Povm,
    born_probabilities,
    diag_complement_povm,
    from_span,
    povm_with_complement,
    pure_probabilities,
    qutrit_case_ii,
    random_povm,
    sic_qubit,
    tensor_povm,
    tensor_povm_n,
    trivial_povm,
    validate,
)
from .span import (
    OperatorSubspace,
    bipartite_complement,
    complement,
    difference_in_kernel,
    is_ic,
    operator_span,
    qutrit_classify,
)
from .rank import (
    IC,
    PSIC,
    VPSIC,
    CertificationReport,
    RankCertificate,
    brute_force_min_rank,
    certify_povm,
    min_rank_pm_search,
    min_rank_search,
    psic_witness_states,
    vpsic_witness_states,
)
from .tomography import (
    LinearInversionTomography,
    PureStateTomography,
    expectation_coeffs,
    linear_inversion,
    pure_state_fit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
