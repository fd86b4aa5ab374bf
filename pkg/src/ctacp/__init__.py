"""Contradiction-tolerant process algebra with propositional signals."""

from .bisim import BisimReport, bisim_classes, bisimilar
from .errors import (
    BudgetError,
    CapacityError,
    CommTableError,
    CtacpError,
    GuardednessError,
    LinearizationError,
    ParseError,
    SignatureError,
    SpecError,
)
from .kernels import BACKEND
from .logic import (
    Cons,
    Iff,
    PropSignature,
    TruthValue,
    classical_taut,
    entails,
    eval_formula,
    is_consistent,
    is_tautology,
    lequiv,
    truth_vector,
)
from .normalize import canonical_key, decide_equal, is_well_formed, root_signal, to_basic
from .recspec import check_guarded, to_linear
from .sos import TICK, build_lts, lts_to_dot, lts_to_json
from .soundness import axiom_soundness_suite
from .syntax import parse_formula, parse_proc, parse_spec, pretty, serialize_spec
from .terms import Spec

__version__ = "0.1.0"
