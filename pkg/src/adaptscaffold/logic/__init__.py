from .bank import InvalidProblem, load_bank, validate_bank
from .formula import (
    And,
    EmptyFormulaError,
    Formula,
    FormulaSyntaxError,
    Iff,
    Imp,
    Not,
    Or,
    Var,
    parse,
    render,
)
from .proof import (
    CycleDetected,
    DanglingParent,
    Problem,
    ProofGraph,
    ProofNode,
    ValidationResult,
    validate_proof,
)
from .rules import RULE_IDS, RULES, ArityMismatch, Rule, check_rule_application
from .semantics import TooManyVariables, entails
from .variants import (
    Bug,
    BugBudgetExceeded,
    BuggyVariant,
    GuidedVariant,
    NoDerivedNodes,
    make_buggy,
    make_guided,
)
