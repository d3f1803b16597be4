"""Shared exception types. CLI exit codes map onto these."""


class InvalidDescriptor(ValueError):
    """A field descriptor violates an invariant; args[0] lists the violations."""


class InvalidInput(ValueError):
    """Malformed file, graph, or option combination."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed its documented size/effort budget."""


class InternalCheckFailed(AssertionError):
    """A self-verification that should be impossible to fail did fail.

    Raised instead of silently returning wrong data (e.g. a structural
    isomorphism that does not verify elementwise).
    """
