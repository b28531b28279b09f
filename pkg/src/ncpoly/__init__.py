"""Exact workbench for noncommutative polynomials and their reductions.

Modules: algebra (words, sparse polynomials, matrices, exact rank),
circuits (DAG IR, expansion, bracketing transforms), abp (branching
programs, transition matrices, Hankel rank), automata (substitution
automata and their matrix compilation), families (generators for the
named polynomial families), reductions (projection, indexed-projection
and matrix-substitution reducibilities plus every concrete construction),
cli (command-line front end).
"""

from .fields import QQ, Field, FieldError, ModInt, PrimeField, field_from_spec
from .algebra import (
    NCPoly,
    PolyMatrix,
    TableMismatchError,
    TermBudgetError,
    Var,
    VarTable,
    Word,
    exact_rank,
    format_poly,
    hadamard_bruteforce,
    parse_poly,
    poly_add,
    poly_mul,
)
from .circuits import (
    Circuit,
    expand,
    format_circuit,
    homogenize,
    is_skew,
    parse_circuit,
    to_bracketed,
    to_skew_bracketed,
)
from .abp import (
    Abp,
    LinearForm,
    abp_eval,
    bounded_depth_dyck_abp,
    format_abp,
    hankel_block,
    hankel_rank,
    parse_abp,
    transition_matrices,
)
from .automata import (
    MatrixSubstitution,
    SubstAutomaton,
    automaton_to_substitution,
    filter_by_automaton,
    hadamard_via_matrices,
)
from .families import FamilyInstance, ChiTable, commutative_version, make_family, nesting_depth

__version__ = "0.1.0"
