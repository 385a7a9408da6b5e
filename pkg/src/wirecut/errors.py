"""Error taxonomy shared across the package.

Every failure the CLI can surface maps to one of these classes; the CLI
translates them to exit codes (usage 1, infeasible 2, verification 3,
resource guard 4).
"""


class WirecutError(Exception):
    """Base class for all package errors."""


class CircuitParseError(WirecutError):
    """Malformed circuit text. Carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NotConnected(WirecutError):
    """Circuit's qubit interaction graph is not a single component."""


class EmptyDag(WirecutError):
    """Circuit has no multi-qubit gates, so there is nothing to cut."""


class WholeCircuitFits(WirecutError):
    """No cut needed: the uncut circuit already satisfies the constraints."""


class Infeasible(WirecutError):
    """No clustering satisfies the constraints."""


class InconsistentSolution(WirecutError):
    """A cut solution does not match the circuit it is applied to."""


class TooLarge(WirecutError):
    """Exhaustive enumeration refused: the DAG is beyond oracle scale."""


class MissingVariant(WirecutError):
    """Attribution input lacks a required subcircuit variant output."""


class MissingTensor(WirecutError):
    """Reconstruction input lacks a required (subcircuit, basis) tensor."""


class LengthMismatch(WirecutError):
    """A vector artifact has the wrong length for its declared qubit count."""


class NegativeMass(WirecutError):
    """A reconstructed probability fell below -clip_tol."""


class NormalizationFailure(WirecutError):
    """An exact-mode distribution does not sum to 1 within tolerance."""


class DdUnnecessary(WirecutError):
    """Recursive query requested although all qubits fit in one recursion."""


class ResourceGuard(WirecutError):
    """A memory or size guard refused the operation."""


class TooManyQubits(ResourceGuard):
    """Statevector request above the simulator's qubit limit."""


class PipelineError(WirecutError):
    """Stage-labelled wrapper so CLI errors say which stage failed."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage={stage}: {cause}")
        self.stage = stage
        self.cause = cause
