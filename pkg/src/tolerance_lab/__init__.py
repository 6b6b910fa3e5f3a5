"""Degree-valued logic engine: models with exact rational truth values,
parameterized consequence relations in plain and tolerant modes, bounded
countermodel search, and a cut-free sequent calculus with similarity rules.
"""

__version__ = "0.1.0"

from .calculus import (
    CheckReport, ProofNode, SearchFailure, check_proof, cut_node,
    format_proof, parse_proof, prove,
)
from .consequence import (
    CUT, Invalid, Mode, SearchBounds, UnknownUpToBounds, Valid, Verdict,
    check_closeness, check_metainference_closure, check_smith_tolerance,
    decide, find_countermodel, identity_similarity_extension, is_countermodel,
    is_parameter_tolerant, satisfies_st_restriction, sorites_sequent,
    zone_representatives,
)
from .parameter import (
    ExplicitSet, Interval, Parameter, ParameterProfile, format_parameter,
    is_open, is_proper, is_symmetric, parse_parameter, preset, profile,
    validate_parameter,
)
from .semantics import (
    FiniteValues, Model, UnitInterval, as_value, crispify, enumerate_models,
    evaluate, format_model, is_closed, parse_model, value_closure,
)
from .syntax import (
    And, Constant, Exists, Forall, Formula, Implies, Not, Or, ParseError,
    Pred, RuleName, Sequent, Sim, Variable, free_variables, parse_formula,
    parse_sequent, parse_sequent_lines, print_formula, print_sequent,
    sequent, substitute,
)
