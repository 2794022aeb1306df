"""Exception types shared across the package."""


class BioaugError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BioaugError):
    """Invalid run configuration; aborts before any work starts."""


class DatasetFormatError(BioaugError):
    """A record could not be parsed. Carries location information."""

    def __init__(self, message, *, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        suffix = f" ({', '.join(loc)})" if loc else ""
        super().__init__(message + suffix)
        self.line = line
        self.field = field


class MissingNotionError(BioaugError):
    """No definition text exists for a label that needs one."""

    def __init__(self, label):
        super().__init__(f"no definition for label '{label}'")
        self.label = label


class NoCandidateKeywordsError(BioaugError):
    """Sentence too short around the target to attribute anything."""


class DegenerateMapError(BioaugError):
    """A normalization singularity: zero reference or equal anchors."""


class NoExemplarsError(BioaugError):
    """No structural exemplars exist for the instance's label."""


class BackendError(BioaugError):
    """A backend call failed. ``retriable`` hints whether retrying may help."""

    def __init__(self, message, *, retriable=False, fingerprint=None):
        super().__init__(message)
        self.retriable = retriable
        self.fingerprint = fingerprint


class ContractViolationError(BioaugError):
    """A backend response broke one of its declared output invariants."""


class SpanRecoveryError(BioaugError):
    """Entity spans could not be re-located unambiguously in a candidate."""


class PromptVariableError(BioaugError):
    """A prompt template placeholder was missing or empty."""

    def __init__(self, placeholder):
        super().__init__(f"missing value for placeholder {placeholder}")
        self.placeholder = placeholder


class AgentResponseError(BioaugError):
    """An agent's reply stayed unparseable after the allowed re-prompt."""


class DebateProtocolError(BioaugError):
    """The debate was configured in a way the protocol cannot run."""
