"""Generators of graded rings of modular forms on Gamma0(N).

Exact q-expansion arithmetic, eta quotients and T-forms, certified bases of
M_k(Gamma0(N)), and a weight-by-weight search for minimal ring generators
over Q, Z and Z[1/M].
"""

__version__ = "0.1.0"

from .qseries import CoeffRing, QExpansion, QQ, ZZ
from .modcurve import CuspData, CurveInvariants, invariants_gamma0
from .etaforms import EtaQuotient, TForm, prime_optimal_tform, scholl_solve_tform, validate_tform
from .bases import BasisProvider, GradedBasis
from .genring import GeneratorSet, algorithm1, run_level

__all__ = [
    "__version__",
    "CoeffRing",
    "QExpansion",
    "QQ",
    "ZZ",
    "CuspData",
    "CurveInvariants",
    "invariants_gamma0",
    "EtaQuotient",
    "TForm",
    "prime_optimal_tform",
    "scholl_solve_tform",
    "validate_tform",
    "BasisProvider",
    "GradedBasis",
    "GeneratorSet",
    "algorithm1",
    "run_level",
]
