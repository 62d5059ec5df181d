"""Exception hierarchy shared across the engine.

Unknown-directive and permission failures are distinct types on purpose:
tooling needs to tell a typo apart from a privilege problem.
"""

from __future__ import annotations


class AgentForgeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AgentForgeError):
    """Malformed input: bad event string, bad chord, bad parameter value."""


class TemplateParseError(AgentForgeError):
    """XML syntax error while parsing a template."""

    def __init__(self, message: str, *, line: int = 0, col: int = 0, filename: str = "<template>"):
        super().__init__(f"{filename}:{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename


class UnknownDirectiveError(AgentForgeError):
    """No directive spec registered under this name, at any privilege."""

    def __init__(self, name: str):
        super().__init__(f'unknown directive "{name}"')
        self.directive = name


class PermissionDeniedError(AgentForgeError):
    """The directive exists but only in groups above the user's privilege."""

    def __init__(self, name: str, required: int, granted: int):
        super().__init__(
            f'directive "{name}" requires privilege {required}, user has {granted}'
        )
        self.directive = name
        self.required = required
        self.granted = granted


class CompileError(AgentForgeError):
    """A validated tree could not be turned into an AgentDefinition."""


class EvalError(AgentForgeError):
    """A directive evaluator failed; message carries the node location."""


class SequencingError(AgentForgeError):
    """An operation ran out of order (e.g. output read before a model call)."""


class PromptAssemblyError(AgentForgeError):
    """The prompt subtree is unusable (typically a missing <user> element)."""


class SelectionRangeError(AgentForgeError):
    """select* resolved to a segment index outside the document."""

    def __init__(self, unit: str, index: int, count: int):
        super().__init__(f"{unit} index {index} out of range [0, {count})")
        self.unit = unit
        self.index = index
        self.count = count


class BusyError(AgentForgeError):
    """The session is already executing a run."""


class UnknownAgentError(AgentForgeError):
    """No compiled agent is registered under this name."""


class FeatureDisabledError(AgentForgeError):
    """The deployment lacks the configuration this feature needs."""


class ProviderError(AgentForgeError):
    """Base class for model-provider failures; `classification` is stable."""

    classification = "provider"


class AuthError(ProviderError):
    classification = "auth"


class NetworkError(ProviderError):
    classification = "network"


class TokenLimitError(ProviderError):
    classification = "token_limit"
