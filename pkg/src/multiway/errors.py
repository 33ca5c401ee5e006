"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and a ``kind``
that the command-line front end maps onto an exit status:
``"parameter"`` -> 2, ``"verification"`` -> 1, ``"internal"`` -> 3.
"""


class MultiwayError(Exception):
    code = "error"
    kind = "parameter"


# parameter errors -------------------------------------------------------

class NotPrime(MultiwayError):
    code = "not_prime"


class CapExceeded(MultiwayError):
    code = "cap_exceeded"


class DoesNotDivide(MultiwayError):
    code = "does_not_divide"


class BadResidueClass(MultiwayError):
    code = "bad_residue_class"


class BadParameters(MultiwayError):
    code = "bad_parameters"


class TooFewFactors(BadParameters):
    code = "too_few_factors"


class DisconnectedDesign(BadParameters):
    code = "disconnected_design"


class RepresentativeNotInCoset(BadParameters):
    code = "representative_not_in_coset"


class UnknownFactor(MultiwayError):
    code = "unknown_factor"


class SameFactor(MultiwayError):
    code = "same_factor"


class MixedLevelCounts(MultiwayError):
    code = "mixed_level_counts"


class NotReducible(MultiwayError):
    code = "not_reducible"


class EmptyBlock(MultiwayError):
    code = "empty_block"


class UnsupportedSetting(MultiwayError):
    code = "unsupported_setting"


class ModeMismatch(MultiwayError):
    code = "mode_mismatch"


class LengthMismatch(MultiwayError):
    code = "length_mismatch"


class NonPositiveEigenvalue(MultiwayError):
    code = "non_positive_eigenvalue"


class Disconnected(MultiwayError):
    code = "disconnected"


class BadBound(MultiwayError):
    code = "bad_bound"


class NotEquireplicate(MultiwayError):
    code = "not_equireplicate"


class Unsatisfiable(MultiwayError):
    code = "unsatisfiable"


class FormatError(MultiwayError):
    code = "format_error"


# verification failures --------------------------------------------------

class HypothesisFailed(MultiwayError):
    code = "hypothesis_failed"
    kind = "verification"


class StuckWalk(MultiwayError):
    code = "stuck_walk"
    kind = "verification"


class CrossCheckFailed(MultiwayError):
    code = "cross_check_failed"
    kind = "verification"


class NotDiagonal(MultiwayError):
    code = "not_diagonal"
    kind = "verification"


class ConvergenceFailure(MultiwayError):
    code = "convergence_failure"
    kind = "internal"


class InvariantViolated(MultiwayError):
    code = "invariant_violated"
    kind = "internal"
