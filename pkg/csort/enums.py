"""
Static constants for reference throughout the application.
"""
from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes of the command line"""
    SUCCESS = 0
    VALIDATION_FAILURE = 1
    INVARIANT_VIOLATION = 2


class Side(IntEnum):
    """Which side of the market a layer point belongs to"""
    WORKER = 1
    JOB = -1

    @property
    def label(self) -> str:
        """Name used in JSON output"""
        return self.name.lower()


class Method(IntEnum):
    """Solver method for the full pipeline"""
    SIMPLE = 0
    EFFICIENT = 1
    LAYERED_POSITIVE = 2
    CONVEX_PAM = 3

    @property
    def label(self) -> str:
        """Name used on the command line"""
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_label(cls, label: str) -> "Method":
        """Look up a method by its command line name"""
        for method in cls:
            if method.label == label:
                return method
        raise ValueError(f"Unknown method: {label}")


class OracleMode(IntEnum):
    """Brute force strategy of the oracle"""
    EXHAUSTIVE = 0
    MATCHING = 1


class DistributionKind(IntEnum):
    """Synthetic economy generators"""
    REFLECTING_BINOMIAL = 0
    BINOMIAL_MIXTURE = 1
    PIECEWISE_UNIFORM = 2


class Flag(IntEnum):
    """Problems reported by the verification checks"""
    MARGINAL_MISMATCH = 0
    INTERSECTING_PAIRS = 1
    SUBMAXIMAL_DIAGONAL = 2
    COST_MISMATCH = 3
    DUAL_INFEASIBLE = 4
    SLACKNESS_VIOLATED = 5
    DUALITY_GAP = 6

    @property
    def label(self) -> str:
        """Name used in JSON output"""
        return self.name.lower()


# Limits of the brute force oracle, in units of mass
EXHAUSTIVE_LIMIT = 8
MATCHING_LIMIT = 200

# Absolute tolerance on the cost scale for every equality check
TOLERANCE = 1e-9
