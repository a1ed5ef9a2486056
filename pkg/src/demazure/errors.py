"""Exception hierarchy shared by every layer of the package.

Each error carries a machine-readable ``reason`` (used by the CLI) and the
``exit_code`` that the command line maps it to.
"""

from __future__ import annotations


class DemazureError(Exception):
    reason = "error"
    exit_code = 1

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.reason)
        self.details = details

    def to_json(self) -> dict:
        out = {"reason": self.reason, "message": str(self)}
        for key, value in self.details.items():
            out[key] = value if isinstance(value, (int, str, float, bool, type(None), list, dict)) else repr(value)
        return out


class ConfigError(DemazureError, ValueError):
    reason = "config_error"
    exit_code = 2


class DescriptorMismatch(ConfigError):
    reason = "descriptor_mismatch"


class ParseError(ConfigError):
    reason = "parse_error"

    def __init__(self, message: str, column: int | None = None, **details):
        super().__init__(message, column=column, **details)
        self.column = column


class UnknownType(ConfigError):
    reason = "unknown_type"


class InvalidLattice(ConfigError):
    reason = "invalid_lattice"


class GroupTooLarge(ConfigError):
    reason = "group_too_large"


class NotARoot(ConfigError):
    reason = "not_a_root"


class HypothesisFailure(DemazureError):
    """A computation hit a failure of the regularity / torsion hypotheses."""

    reason = "hypothesis_failure"
    exit_code = 3


class NotDivisible(HypothesisFailure, ArithmeticError):
    reason = "not_divisible"


class NotUnimodular(HypothesisFailure):
    reason = "not_unimodular"


class NotUnimodularLinearPart(NotDivisible):
    reason = "not_unimodular_linear_part"


class NoSolution(HypothesisFailure):
    reason = "no_solution"


class NonzeroConstantTerm(HypothesisFailure, ValueError):
    reason = "nonzero_constant_term"


class NonUnitConstantTerm(HypothesisFailure, ArithmeticError):
    reason = "non_unit_constant_term"


class AxiomViolation(HypothesisFailure, ValueError):
    reason = "axiom_violation"


class NotInS(HypothesisFailure):
    reason = "not_in_S"


class RootNotRegular(HypothesisFailure):
    """Some ``x_alpha`` vanishes, so inverting it collapses Q to the zero ring."""

    reason = "root_not_regular"


class DivisionCrossCheckFailed(HypothesisFailure):
    reason = "division_cross_check_failed"


class CertificateFailure(HypothesisFailure):
    reason = "certificate_failure"


class PrecisionExhausted(DemazureError, ArithmeticError):
    reason = "precision_exhausted"
    exit_code = 4
