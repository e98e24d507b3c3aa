"""
Fields bound to every log record emitted in the current context.

The checker evaluates places one after another (or concurrently), and each record
should say which place it belongs to without threading the place through every call.
"""

import contextlib
import copy
from collections.abc import Generator
from contextvars import ContextVar
from typing import Any

_log_context: ContextVar[dict[str, Any]] = ContextVar('_log_context')


def get_log_context(should_copy: bool = False) -> dict[str, Any]:  # noqa: FBT001,FBT002
    try:
        bound = _log_context.get()
    except LookupError:
        # nothing was bound yet in this context
        bound = {}
    if should_copy:
        return copy.deepcopy(bound)
    return bound


@contextlib.contextmanager
def bind_log_context(**fields: Any) -> Generator[None, None, None]:
    # copy first: nested bindings must not leak their fields into the outer context
    token = _log_context.set(get_log_context(should_copy=True) | fields)
    try:
        yield
    finally:
        _log_context.reset(token)
