class QflabError(Exception):
    """Base class for every error raised by qflab."""


class ZeroInputError(QflabError, ValueError):
    """A zero value was passed where a unit of ℚ* (or of a function field) is required."""


class InvalidPrimeError(QflabError, ValueError):
    """The argument is not a prime, or not an odd prime where one is required."""


class UnsupportedOperationError(QflabError, ValueError):
    """The request is well formed but lies outside what qflab can decide."""


class InvariantViolationError(QflabError, RuntimeError):
    """An internal self-check failed."""


class SearchExhaustedError(QflabError, RuntimeError):
    """A bounded constructive search ended without a result."""


class CommandLineError(QflabError):
    """Invalid command line invocation."""


class ParseError(QflabError, ValueError):
    """
    Malformed text input.

    Keeps the original text and the 0-based position of the offending character,
    so the message can point at it.
    """

    def __init__(self, message: str, text: str, position: int) -> None:
        self.reason = message
        self.text = text
        self.position = max(0, min(position, len(text)))
        super().__init__(self._render())

    def _render(self) -> str:
        caret = ' ' * self.position + '^'
        return f'{self.reason} at position {self.position}\n  {self.text}\n  {caret}'


class MissingDependencyError(ImportError):
    """
    Missing optional dependency.
    This exception is raised only when a module depends on a dependency that has not been installed.
    """

    def __init__(self, package: str, install_package: str | None = None) -> None:
        err_msg = (
            f'Package {package!r} is not installed but required. You can install it by running '  # noqa: WPS237
            f'pip install {install_package or package}'
        )
        super().__init__(err_msg)
