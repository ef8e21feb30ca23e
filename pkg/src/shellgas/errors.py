class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""
