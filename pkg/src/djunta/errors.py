"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Bit-string, block, or distribution dimensions do not line up."""


class EmptyDomainError(ValueError):
    """An operation would produce an empty domain or empty support."""


class ContractError(ValueError):
    """A caller violated a documented precondition."""


class BudgetError(RuntimeError):
    """A procedure exceeded its own query budget.  Always a bug, never input error."""


class SizeError(ValueError):
    """A brute-force or table-based operation would exceed its hard size cap."""


class WitnessError(RuntimeError):
    """A rejection witness failed re-verification.  Always a bug, never input error."""
