"""Bi-capacities, capacities and their Choquet integrals.

Set functions are dense numpy tables indexed by bitmask (subsets) or by a
ternary code (disjoint pairs). See :mod:`bicap.setfn` for the encoding.
"""

from ._accel import backend_name
from .integrals import (
    BipolarValue,
    CptModel,
    EbViolationError,
    InadmissiblePermutationError,
    bicap_choquet,
    bicap_choquet_2additive,
    bicap_choquet_batch,
    bicap_choquet_mobius,
    bipolar_choquet,
    bipolar_from_bicapacity,
    biunanimity_choquet,
    check_eb,
    rearrangement_coefficients,
    choquet,
    choquet_asymmetric,
    choquet_asymmetric_2additive,
    choquet_symmetric,
    choquet_symmetric_2additive,
    cpt,
    cpt_2additive,
    cpt_2additive_from_interactions,
    partial_convexity_sums,
    reduce_bipolar,
    reflect,
    reflect_act,
    signed_game,
)
from .setfn import (
    DEFAULT_TOL,
    BiCapacity,
    BiGame,
    BipolarCapacity,
    Capacity,
    CapExceededError,
    Game,
    ValidationReport,
    additive_capacity,
    biunanimity_game,
    conjugate,
    cpt_bicapacity,
    decompose_act,
    format_pair,
    format_set,
    generate_random_2additive_bicapacity,
    generate_random_2additive_capacity,
    generate_random_bicapacity,
    generate_random_bipolar,
    generate_random_capacity,
    iter_pairs,
    members,
    pair_index,
    ternary_act,
    to_mask,
    unanimity_game,
    validate_bicapacity,
    validate_bipolar,
    validate_capacity,
)
from .transforms import (
    CoMobiusRep,
    InteractionRep,
    MobiusRep,
    NotTwoAdditiveError,
    bi_derivative,
    biinteraction,
    biinteraction_direct,
    bimobius,
    check_interaction_validity,
    check_mobius_validity,
    comobius,
    derivative,
    interaction,
    mobius,
    twoadd_I_from_m,
    twoadd_m_from_I,
    zeta,
)

__version__ = "0.1.0"
