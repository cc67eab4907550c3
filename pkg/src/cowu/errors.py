class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(ValueError):
    """The requested configuration cannot be realized (e.g. RR with N_w > L)."""
