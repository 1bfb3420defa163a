class BudgetError(Exception):
    """A configured enumeration or window budget was exceeded."""


class WindowError(Exception):
    """A verification window (ball radius) was too small for the request."""
