"""Formal affine Demazure algebras: formal group algebras of root data, Demazure
operators, the twisted group algebra Q_W, the Demazure algebra D_F with its
coproduct, and the dual algebra with the integer solvers around it."""

from .coeffring import Integers, IntegersInv, IntegersMod, Poly, parse_ring
from .demazurealgebra import CoproductTable, DemazureAlgebra, DFElem
from .dualalgebra import DualAlgebra, DualElem, dual_mul
from .errors import (ConfigError, DemazureError, HypothesisFailure, NotDivisible, NotInS,
                     PrecisionExhausted)
from .fgl import FormalGroupLaw, build_additive, build_custom, build_hyperbolic, build_law, build_multiplicative
from .formalgroupalgebra import AlgebraConfig, FGAContext, make_context
from .powerseries import DIVISION_LEDGER, TruncSeries
from .rootdata import RootDatum, WeylGroup, build, enumerate_weyl
from .twistedalgebra import QElem, QWElem, QWTensor, TwistedAlgebra

__all__ = [
    "AlgebraConfig", "ConfigError", "CoproductTable", "DFElem", "DIVISION_LEDGER", "DemazureAlgebra",
    "DemazureError", "DualAlgebra", "DualElem", "FGAContext", "FormalGroupLaw", "HypothesisFailure", "Integers",
    "IntegersInv", "IntegersMod", "NotDivisible", "NotInS", "Poly", "PrecisionExhausted", "QElem", "QWElem",
    "QWTensor", "RootDatum", "TruncSeries", "TwistedAlgebra", "WeylGroup", "build", "build_additive",
    "build_custom", "build_hyperbolic", "build_law", "build_multiplicative", "dual_mul", "enumerate_weyl",
    "make_context", "parse_ring",
]
