"""Bochvar external logic and Bochvar algebras as executable finite mathematics."""

from bochvar.algebra_core import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    Verdict,
    builtin,
    direct_product,
    enumerate_homomorphisms,
    evaluate,
    find_embedding,
    find_isomorphism,
    holds_quasi_identity,
    load_algebra,
    parse_algebra,
    principal_congruence,
    quotient,
    separates_into,
    subalgebra_generated,
)
from bochvar.classify import ChainVerdict, build_retraction, classify, has_fixpoint
from bochvar.errors import BochvarError
from bochvar.matrix_logic import LogicalMatrix, consequence, is_theorem, matrix_of
from bochvar.plonka import attach_J, decompose, enumerate_bca, plonka_sum
from bochvar.terms import Equation, QuasiIdentity, Rule, Term, parse_quasi_identity, parse_rule, parse_term, render_term

__all__ = [
    "BochvarError",
    "ChainVerdict",
    "Congruence",
    "Equation",
    "FiniteAlgebra",
    "Homomorphism",
    "LogicalMatrix",
    "QuasiIdentity",
    "Rule",
    "Signature",
    "Term",
    "Verdict",
    "attach_J",
    "build_retraction",
    "builtin",
    "classify",
    "consequence",
    "decompose",
    "direct_product",
    "enumerate_bca",
    "enumerate_homomorphisms",
    "evaluate",
    "find_embedding",
    "find_isomorphism",
    "has_fixpoint",
    "holds_quasi_identity",
    "is_theorem",
    "load_algebra",
    "matrix_of",
    "parse_algebra",
    "parse_quasi_identity",
    "parse_rule",
    "parse_term",
    "plonka_sum",
    "principal_congruence",
    "quotient",
    "render_term",
    "separates_into",
    "subalgebra_generated",
]
