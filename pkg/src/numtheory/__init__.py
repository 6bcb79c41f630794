from .unit_group import UnitGroupStructure, decompose_unit_group, discrete_log
from .dirichlet import (
    DirichletCharacter,
    FieldOrbit,
    characters_of_exact_order,
    conductor_of,
    conrey_index,
    evaluate,
    galois_orbits,
)
from .cyclotomic import (
    CycInt,
    CycRational,
    conjugate,
    exact_div_by_integer,
    norm,
    root_of_unity,
)
from .relclass import (
    HMinusRecord,
    analytic_oracle,
    character_sum,
    h_minus,
    l_at_zero,
    scaled_l_at_zero,
    w_and_Q,
)
from .splitting import (
    SplittingReport,
    factor_degrees_mod_p,
    multiplicative_order,
    splitting_report,
    squarefree_norm_possible,
    theorem_mechanism_check,
)

__all__ = [
    'UnitGroupStructure',
    'decompose_unit_group',
    'discrete_log',
    'DirichletCharacter',
    'FieldOrbit',
    'characters_of_exact_order',
    'conductor_of',
    'conrey_index',
    'evaluate',
    'galois_orbits',
    'CycInt',
    'CycRational',
    'conjugate',
    'exact_div_by_integer',
    'norm',
    'root_of_unity',
    'HMinusRecord',
    'analytic_oracle',
    'character_sum',
    'h_minus',
    'l_at_zero',
    'scaled_l_at_zero',
    'w_and_Q',
    'SplittingReport',
    'factor_degrees_mod_p',
    'multiplicative_order',
    'splitting_report',
    'squarefree_norm_possible',
    'theorem_mechanism_check',
]
