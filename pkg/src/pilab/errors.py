"""Exception types shared across the package.

Every error carries a stable ``code`` used by the CLI in its JSON error
records, so downstream tooling never has to parse messages.
"""


class PilabError(Exception):
    code = "PilabError"
    exit_code = 3           # solver / computation failure; input errors use 2

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_record(self):
        rec = {"error": self.code, "message": str(self)}
        rec.update({k: _jsonable(v) for k, v in self.details.items()})
        return rec


def _jsonable(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    try:
        return float(v)
    except (TypeError, ValueError):
        return str(v)


class NotATotalDerivative(PilabError):
    code = "NotATotalDerivative"


class MissingAssignment(PilabError):
    code = "MissingAssignment"
    exit_code = 2


class OddOrderRequested(PilabError):
    code = "OddOrderRequested"
    exit_code = 2


class BranchViolation(PilabError):
    code = "BranchViolation"
    exit_code = 2


class ConfigInvalid(PilabError):
    code = "ConfigInvalid"
    exit_code = 2


class NewtonDiverged(PilabError):
    code = "NewtonDiverged"


class JacobianSingular(PilabError):
    code = "JacobianSingular"


class WindowTooSmall(PilabError):
    code = "WindowTooSmall"
    exit_code = 2


class OutOfDomain(PilabError):
    code = "OutOfDomain"
    exit_code = 2


class MonotonicityLost(PilabError):
    code = "MonotonicityLost"


class ConstraintSingular(PilabError):
    code = "ConstraintSingular"


class MultivaluedRegion(PilabError):
    code = "MultivaluedRegion"


class NoBracket(PilabError):
    code = "NoBracket"


class MaximizerNotUnique(PilabError):
    code = "MaximizerNotUnique"


class DerivativeChainBroken(PilabError):
    code = "DerivativeChainBroken"


class ResolutionInsufficient(PilabError):
    code = "ResolutionInsufficient"


class Blowup(PilabError):
    code = "Blowup"


class WindowOutsideSolutionDomain(PilabError):
    code = "WindowOutsideSolutionDomain"


class SchemaViolation(PilabError):
    code = "SchemaViolation"
    exit_code = 2
