"""
Exception hierarchy for pdrsmith

Every error raised on purpose by the library derives from PdrsmithError so the
CLI can map it to exit code 3 with a one-line message.
"""


class PdrsmithError(Exception):
    """Base class for all pdrsmith errors"""


class InternalError(PdrsmithError):
    """A checked internal invariant failed (a bug, never a verdict)"""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class AigerParseError(PdrsmithError):
    """Malformed AIGER input; position is a line number (ASCII) or byte offset (binary)"""

    def __init__(self, message, position=None, unit='line'):
        where = f" at {unit} {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position
        self.unit = unit


class SimulationError(PdrsmithError):
    """Bit-vector widths do not match the circuit"""


class SolverError(PdrsmithError):
    """Invalid use of the SAT backend"""


class EncodingError(PdrsmithError):
    """Invalid cube or literal handed to the CNF encoding"""


class PolicyError(PdrsmithError):
    """Unknown slot, variant or parameter"""


class CheckTimeout(PdrsmithError):
    """Wall-clock deadline reached"""


class CertificateFormatError(PdrsmithError):
    """Malformed .cert file"""


class WitnessFormatError(PdrsmithError):
    """Malformed .cex file"""


class BenchError(PdrsmithError):
    """Suite could not be set up"""


class ConfigError(PdrsmithError):
    """Invalid run configuration"""


class PatchRejected(PdrsmithError):
    """Patch refused before build"""

    def __init__(self, reasons):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)


class PatchApplyError(PdrsmithError):
    """Diff does not apply to the checkout"""


class BuildFailed(PdrsmithError):
    """Challenger build command returned non-zero"""

    def __init__(self, message, log=""):
        super().__init__(message)
        self.log = log


class AgentError(PdrsmithError):
    """Agent produced no usable answer"""


class AgentTransportError(AgentError):
    """Agent endpoint unreachable or returned an HTTP error"""


class AgentSchemaError(AgentError):
    """Agent document failed schema validation"""


class PromptOverflowError(PdrsmithError):
    """Prompt exceeds its budget even in slim form"""

    def __init__(self, message, sections):
        sizes = ", ".join(f"{k}={v}" for k, v in sections.items())
        super().__init__(f"{message} ({sizes})")
        self.sections = dict(sections)


class SuiteMismatchError(PdrsmithError):
    """Reports compared by promotion cover different instances"""


class ScopeViolation(PatchRejected):
    """Patch touches files outside the allowed slots"""
