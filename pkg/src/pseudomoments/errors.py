"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """A computation would need more table entries than the configured budget.

    Attributes:
        needed: entry count the computation requires
        budget: entry count the caller allowed
    """

    def __init__(self, needed: int, budget: int, what: str = "table entries"):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"budget exceeded: {what} needs {needed} entries, budget is {budget}"
        )


class SeriesDivergenceError(RuntimeError):
    """A local Euler-factor series failed to contract before the term cutoff."""

    def __init__(self, p: int, k: int, rho_squared, j_max: int):
        self.p = p
        self.k = k
        self.rho_squared = rho_squared
        super().__init__(
            f"local factor series at p={p}, k={k}, rho^2={rho_squared} "
            f"did not converge within {j_max} terms"
        )
