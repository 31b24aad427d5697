"""Exception hierarchy."""


class ScenarioError(ValueError):
    """A scenario, schedule or configuration violates one of its invariants."""


class ConstraintError(ScenarioError):
    """The payout ceiling constraint C_min >= usagefee_max >= 0 does not hold."""


class DegenerateAnalysisError(ZeroDivisionError):
    """A closed-form analysis would divide by zero (no customers or zero ceiling)."""
