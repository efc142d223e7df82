class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured size budget."""
